#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

#include "awl/kernels.hpp"
#include "awl/linear2.hpp"
#include "awl/noise.hpp"
#include "awl/rng.hpp"
#include "awl/spectral.hpp"

namespace awl {

// Slow-fast form of the damped wave equation,
//   du = v dt
//   dv = -(1/nu) [v - Lap u - f(u)] dt + nu^{alpha-1} dW,
// integrated per sine mode with the exact linear propagator, and the
// averaged model du = [Lap u + f(u)] dt + nu^alpha dW.

class BlowUpError : public std::runtime_error {
public:
    BlowUpError() : std::runtime_error("trajectory blew up"), time(-1.0) {}
    explicit BlowUpError(double t)
        : std::runtime_error("trajectory blew up at t=" + std::to_string(t)),
          time(t) {}
    double time;  // negative when the step does not know the clock
};

enum class Scheme { StiffExact, EulerMaruyama };

struct WaveState {
    SpectralField u;  // displacement
    SpectralField v;  // velocity u_t

    bool finite() const { return u.finite() && v.finite(); }
};

struct WaveParams {
    double nu = 0.01;
    double alpha = 0.5;
    double beta = 1.0;
    NoiseModel noise;
    double dt = 1e-3;
    double T = 1.0;
    int K = 8;
    Scheme scheme = Scheme::StiffExact;

    void validate() const;
};

// Exact one-step data for a single mode of the linear slow-fast pair
// A_k = [[0, 1], [-lambda_k/nu, -1/nu]].
struct ModePropagator {
    Mat2 E;                        // exp(dt A_k)
    Mat2 F;                        // int_0^dt exp(A_k s) ds, forcing weight
    std::array<double, 3> Sigma;   // (s_uu, s_uv, s_vv) noise covariance
    double l11 = 0, l21 = 0, l22 = 0;  // lower factor of Sigma
};

ModePropagator build_propagator(double lambda, double nu, double alpha,
                                double b, double h);

struct WaveTrajectory {
    std::vector<double> times;
    std::vector<SpectralField> u;
    std::vector<SpectralField> v;
};

class WaveIntegrator {
public:
    explicit WaveIntegrator(const WaveParams& p);

    const WaveParams& params() const { return p_; }

    void step(WaveState& s, RngStream& rng) const;

    WaveTrajectory simulate(const SpectralField& u0, const SpectralField& u1,
                            RngStream& rng, int record_every = 1) const;

private:
    friend class CoupledPair;
    void step_stiff_exact(WaveState& s, RngStream& rng) const;
    void step_euler_maruyama(WaveState& s, RngStream& rng) const;

    WaveParams p_;
    SineTransform dst_;
    std::vector<ModePropagator> props_;  // stiff-exact only
};

// Averaged model, per-mode exponential Euler (exact for the linear part):
// u_k' = e^{-lam h} u_k + (1-e^{-lam h})/lam f_k(u) + nu^alpha N(0, b_k(1-e^{-2 lam h})/(2 lam)).
class AveragedIntegrator {
public:
    explicit AveragedIntegrator(const WaveParams& p);

    void step(SpectralField& u, RngStream& rng) const;
    WaveTrajectory simulate(const SpectralField& u0, RngStream& rng,
                            int record_every = 1) const;

private:
    friend class CoupledPair;
    void apply_drift(SpectralField& u) const;

    WaveParams p_;
    SineTransform dst_;
    std::vector<double> decay_, fweight_, nstd_;
};

// Runs the full and averaged models on one underlying Wiener path
// (common-noise coupling): per mode and step, the wave convolution noise
// and the averaged-model noise are drawn jointly from their exact
// covariance, so the comparison theorems' distributional setting is
// preserved while the Monte Carlo difference variance collapses.
class CoupledPair {
public:
    explicit CoupledPair(const WaveParams& p);

    void step(WaveState& full, SpectralField& avg, RngStream& rng) const;
    // terminal states after integrating to T
    std::pair<WaveState, SpectralField> run(const SpectralField& u0,
                                            const SpectralField& u1,
                                            RngStream& rng) const;

private:
    WaveParams p_;
    WaveIntegrator wave_;
    AveragedIntegrator avg_;
    std::vector<JointGaussian> joint_;  // per mode: (wave_u, wave_v, avg)
};

// Fast equation with the slow field frozen:
//   dv = -(1/nu)[v - Lap u - f(u)] dt + nu^{alpha-1} dW;
// per-mode exact OU toward mean (Lap u + f(u))_k.
struct FastTrajectory {
    std::vector<double> times;
    std::vector<SpectralField> v;
    SpectralField mean_target;  // (Lap u + f(u)) of the frozen field
};

FastTrajectory simulate_fast_frozen(const WaveParams& p,
                                    const SpectralField& u_frozen,
                                    const SpectralField& v0, RngStream& rng,
                                    int record_every = 1);

enum class ScaleDirection { Forward, Backward };

// u~ = nu^{1/2-alpha} u (forward); backward inverts.
WaveState scale_transform(const WaveState& s, double nu, double alpha,
                          ScaleDirection dir);

}  // namespace awl
