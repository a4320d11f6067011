#pragma once

#include <cstdint>
#include <vector>

#include "awl/kernels.hpp"
#include "awl/rng.hpp"
#include "awl/spectral.hpp"

namespace awl {

// Slow-manifold machinery for the homotopy system
//   u_t = u_xx + u + v,
//   nu v_t = -v - gamma nu (d_xx + 1) u_t + beta' u - u^3 + sigma W_t,
// its slow SDE for the sin x amplitude, the manifold field, and residual
// scaling checks.  Everything here works in plain sin kx amplitudes.

struct SsmParams {
    double nu = 1e-3;
    double gamma = 1.0;        // homotopy parameter in [0,1]
    double beta_prime = 0.0;   // distance from the bifurcation
    double sigma = 0.0;        // global noise size, multiplies amps
    std::vector<double> amps;  // per-mode noise amplitudes b_k
    int K_ssm = 5;
    double validity_radius = 0.5;

    void validate() const;
    // sigma * amps[k-1], zero past the configured amplitudes
    double amp(int k) const;
};

// decay rate of mode k about the slow subspace
inline double mu(int k) { return static_cast<double>(k) * k - 1.0; }

// Ornstein-Uhlenbeck convolution bank: exact one-step sampling of the
// history integrals Z_mu w = int_-inf^t e^{-mu(t-s)} dw_s, the iterated
// cascades Z_mu Z_mu' w, the fast convolutions at rate 1/nu, and the raw
// increments dw_k, all driven by the same Wiener paths so that every
// cross-correlation is exact.
class OuBank {
public:
    OuBank(const SsmParams& p, double h);

    void step(RngStream& rng);

    int K() const { return K_; }
    double step_size() const { return h_; }

    double dw(int k) const { return dw_[k - 1]; }
    double z1(int k) const { return z1_[k - 1]; }          // Z_{mu_k} w_k, k >= 2
    double z8w1() const { return z8w1_; }                  // Z_8 w_1
    double zfast(int k) const { return zf_[k - 1]; }       // Z_{1/nu} w_k
    double z2_same(int k) const { return z2s_[k - 1]; }    // Z_{mu_k} Z_{mu_k} w_k
    double z2_out(int k) const { return z2o_[k - 1]; }     // Z_{mu_k} Z_{mu_{k+2}} w_{k+2}
    double z2_shift(int k) const { return z2h_[k - 1]; }   // Z_{mu_{k+2}} Z_{mu_k} w_k

private:
    int K_;
    double h_, nu_;
    std::vector<double> dw_, z1_, zf_, z2s_, z2o_, z2h_;
    double z8w1_ = 0.0;
    std::vector<JointGaussian> joint_;  // one group per driving noise
    std::vector<double> emu_, g_cross_;  // e^{-mu_k h}; cross-cascade weight
    double e8_ = 0.0, ef_ = 0.0;
};

// One increment of the slow SDE over the bank's step.  The formula is
// gamma-free and references only the raw increments dw_1, dw_3, dw_5.
double ssm_drift_diffusion(double a, const SsmParams& p, const OuBank& bank);

// Same formula with every nu-dependent term removed; shares the
// implementation, evaluated at nu = 0.
double averaged_ssm_drift_diffusion(double a, const SsmParams& p,
                                    const OuBank& bank);

// The manifold field for slow amplitude a, assembled from bank states.
SpectralField ssm_field(double a, const SsmParams& p, const OuBank& bank);

// Drift right-hand sides of the homotopy system on plain-sin fields; the
// gamma term substitutes the u equation so the pair is explicit.  Noise
// is the caller's business.
void homotopy_rhs(const SpectralField& u, const SpectralField& v,
                  const SsmParams& p, const Grid& grid, SpectralField& ut,
                  SpectralField& vt);

// Time stepper for the homotopy system: exact per-mode linear propagator
// plus explicit cubic, exact additive noise.
class HomotopyIntegrator {
public:
    HomotopyIntegrator(const SsmParams& p, double dt);

    void step(SpectralField& u, SpectralField& v, RngStream& rng) const;

private:
    SsmParams p_;
    double dt_;
    SineTransform dst_;
    struct ModeStep {
        double e11, e12, e21, e22;  // exp(dt M_k)
        double f12, f22;            // phi1 columns hit by (0, *) forcing
        double l11, l21, l22;       // noise factor
    };
    std::vector<ModeStep> modes_;
};

struct ResidualReport {
    std::vector<double> xs;     // the swept parameter (a or nu)
    std::vector<double> norms;  // sup norm (deterministic) or RMS (noisy)
    double slope = 0.0;
    double r2 = 0.0;
};

// Residual of nu u_tt + u_t = u_xx + (1+beta')u - u^3 under the
// deterministic manifold u = a sin x + (1/32) a^3 sin 3x with
// da/dt = beta' a - (3/4) a^3, swept over a; requires sigma = 0.
ResidualReport residual_deterministic(const SsmParams& p,
                                      const std::vector<double>& a_values,
                                      int grid_points = 2001);

// Time-averaged RMS residual of the homotopy pair along an exactly
// sampled linear-noise manifold path (a = 0, beta' = 0, cubic off),
// swept over nu; slope vs nu is the quoted order check.
ResidualReport residual_linear_noise(const SsmParams& p,
                                     const std::vector<double>& nu_values,
                                     double h, int nsteps, int burn_in,
                                     uint64_t seed);

}  // namespace awl
