// End-to-end acceptance checks, one printed line per criterion.  Every
// tolerance and seed is pinned here so a run either reproduces this
// output or flags a regression.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "awl/diagnostics.hpp"
#include "awl/dynamics.hpp"
#include "awl/noise.hpp"
#include "awl/rng.hpp"
#include "awl/spectral.hpp"
#include "awl/ssm.hpp"

using namespace awl;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool ok) {
    std::printf("%s  %2d  %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    if (!ok) ++failures;
}

SpectralField mode_field(int K, int k, double c) {
    SpectralField f(SineBasis{K, Normalization::Orthonormal});
    if (k >= 1) f.c[k - 1] = c;
    return f;
}

// 1: the frozen fast process equilibrates to the Gaussian law with the
// drift mean and variance nu^(2 alpha - 1) b_k / 2, from two different
// slow fields
bool fast_stationary_law() {
    WaveParams p;
    p.nu = 0.01;
    p.alpha = 0.5;
    p.beta = 1.0;
    p.K = 8;
    p.noise = NoiseModel::power_law(8, 4.0);
    p.dt = 2e-3;
    p.T = 5.5;
    const int skip = 250;  // burn-in 0.5
    const std::size_t ensemble = 256;
    const int threads = resolve_threads(0);

    bool ok = true;
    int ic = 0;
    for (const SpectralField& u0 :
         {mode_field(8, 0, 0.0), mode_field(8, 1, 1.0)}) {
        const SpectralField v0(u0.basis);
        std::vector<FastTrajectory> trajs(ensemble);
        run_indexed(ensemble, threads, [&](std::size_t i) {
            RngStream rng(1001 + ic, i, "acc-fast");
            trajs[i] = simulate_fast_frozen(p, u0, v0, rng);
        });
        const SpectralField& target = trajs[0].mean_target;
        for (int k = 1; k <= p.K; ++k) {
            std::vector<double> samples;
            for (const auto& tr : trajs)
                for (std::size_t j = skip; j < tr.v.size(); ++j)
                    samples.push_back(tr.v[j].c[k - 1]);
            const StationaryStats s = stationary_stats(samples, p.dt, p.nu);
            const double se_mean = std::sqrt(s.variance / s.ess);
            const double var_target = p.noise.b[k - 1] / 2.0;
            ok = ok && std::abs(s.mean - target.c[k - 1]) <= 3.0 * se_mean;
            ok = ok && std::abs(s.variance / var_target - 1.0) <= 0.05;
        }
        ++ic;
    }
    return ok;
}

// 2: the realized quadratic variation of the test-function martingale
// grows linearly with rate b_1
bool martingale_qv_rate() {
    WaveParams p;
    p.nu = 0.005;
    p.alpha = 0.5;
    p.beta = 1.0;
    p.K = 1;
    p.noise = NoiseModel({1.0}, 0.5);
    p.dt = 1e-3;
    p.T = 2.0;
    const std::size_t ensemble = 400;
    const SpectralField u0 = mode_field(1, 1, 0.3);
    const SpectralField u1(u0.basis);
    SpectralField phi = mode_field(1, 1, 1.0);

    std::vector<std::vector<double>> qvs(ensemble);
    std::vector<double> qv_times;
    const WaveIntegrator integ(p);
    run_indexed(ensemble, resolve_threads(0), [&](std::size_t i) {
        RngStream rng(2001, i, "acc-qv");
        const auto tr = integ.simulate(u0, u1, rng);
        const auto m = martingale_process(tr, phi, p.nu, p.beta);
        const auto qv = realized_qv(tr.times, m, 100);
        qvs[i] = qv.qv;
        if (i == 0) qv_times = qv.times;
    });
    std::vector<double> mean(qv_times.size(), 0.0);
    for (const auto& q : qvs)
        for (std::size_t j = 0; j < q.size(); ++j) mean[j] += q[j] / ensemble;
    const LineFit fit = fit_line(qv_times, mean);
    return std::abs(fit.slope - 1.0) <= 0.10 && fit.r2 > 0.99;
}

struct WeakTable {
    std::vector<WeakErrorRow> rows;
};

WeakTable weak_error_table(double alpha, uint64_t seed) {
    const std::vector<double> nu_grid{0.04, 0.02, 0.01, 0.005};
    const std::size_t ensemble = 4096;
    WeakTable out;
    for (std::size_t g = 0; g < nu_grid.size(); ++g) {
        WaveParams p;
        p.nu = nu_grid[g];
        p.alpha = alpha;
        p.beta = 1.0;
        p.K = 8;
        p.noise = NoiseModel::power_law(8, 4.0, alpha);
        p.dt = 1e-3;
        p.T = 0.5;
        const SpectralField u0 = mode_field(8, 1, 0.3);
        const SpectralField u1 = mode_field(8, 1, 1.0);
        const CoupledPair pair(p);
        std::vector<double> vals(ensemble, 0.0);
        run_indexed(ensemble, resolve_threads(0), [&](std::size_t i) {
            RngStream rng(seed, i, "acc-weak-" + std::to_string(g));
            const auto [full, avg] = pair.run(u0, u1, rng);
            vals[i] = full.u.c[0] - avg.c[0];
        });
        const SummaryStats s = summarize(vals);
        WeakErrorRow row;
        row.nu = nu_grid[g];
        row.error = std::abs(s.mean);
        row.std_error = s.std_error;
        row.conclusive = row.error > 2.0 * row.std_error;
        out.rows.push_back(row);
    }
    return out;
}

// 3: at alpha = 1/2 the weak error decays with a positive fitted order
bool weak_error_order_half(const WeakTable& t) {
    for (const auto& r : t.rows)
        if (!r.conclusive) return false;
    const OrderFit f = order_fit(t.rows);
    return f.rate >= 0.4 && f.r2 >= 0.9;
}

// 4: at alpha = 0 the weak error still shrinks with nu, confidence
// intervals separated
bool weak_error_alpha_zero(const WeakTable& t) {
    const WeakErrorRow& coarse = t.rows.front();
    const WeakErrorRow& fine = t.rows.back();
    return fine.error + 2.0 * fine.std_error <
           coarse.error - 2.0 * coarse.std_error;
}

// 5: terminal laws of the exact propagator and the Euler-Maruyama
// discretization agree mode by mode at the 5% KS level
bool scheme_distributional_match() {
    WaveParams pe;
    pe.nu = 0.02;
    pe.alpha = 0.5;
    pe.beta = 1.0;
    pe.K = 4;
    pe.noise = NoiseModel({1.0, 0.5, 0.25, 0.125}, 0.5);
    pe.dt = 1e-3;
    pe.T = 0.5;
    pe.scheme = Scheme::StiffExact;
    WaveParams pm = pe;
    pm.dt = 2e-4;  // nu / 100
    pm.scheme = Scheme::EulerMaruyama;
    const SpectralField u0 = mode_field(4, 1, 0.3);
    const SpectralField u1(u0.basis);
    const std::size_t n = 2000;

    std::vector<std::vector<double>> xe(4, std::vector<double>(n)),
        xm(4, std::vector<double>(n));
    const WaveIntegrator ie(pe), im(pm);
    run_indexed(n, resolve_threads(0), [&](std::size_t i) {
        RngStream re(5001, i, "acc-ks-exact");
        RngStream rm(5002, i, "acc-ks-em");
        const auto te = ie.simulate(u0, u1, re, 1 << 30);
        const auto tm = im.simulate(u0, u1, rm, 1 << 30);
        for (int k = 0; k < 4; ++k) {
            xe[k][i] = te.u.back().c[k];
            xm[k][i] = tm.u.back().c[k];
        }
    });
    for (int k = 0; k < 4; ++k)
        if (ks_distance(xe[k], xm[k]).reject) return false;
    return true;
}

// 6: the running maximum of the H^1 energy stays uniformly bounded in nu
// and no trajectory blows up
bool uniform_energy_bound() {
    const std::vector<double> nu_grid{0.04, 0.02, 0.01, 0.005};
    const std::size_t ensemble = 64;
    std::vector<double> level;
    for (std::size_t g = 0; g < nu_grid.size(); ++g) {
        WaveParams p;
        p.nu = nu_grid[g];
        p.alpha = 0.5;
        p.beta = 1.0;
        p.K = 8;
        p.noise = NoiseModel::power_law(8, 4.0);
        p.dt = 1e-3;
        p.T = 1.0;
        const SpectralField u0 = mode_field(8, 1, 0.3);
        const SpectralField u1 = mode_field(8, 1, 1.0);
        const WaveIntegrator integ(p);
        std::vector<double> peak(ensemble, 0.0);
        std::vector<int> blew(ensemble, 0);
        run_indexed(ensemble, resolve_threads(0), [&](std::size_t i) {
            RngStream rng(6001, i, "acc-energy-" + std::to_string(g));
            try {
                const auto tr = integ.simulate(u0, u1, rng);
                double m = 0.0;
                for (const auto& u : tr.u) {
                    const double e = sobolev_norm(u, 1.0);
                    m = std::max(m, e * e);
                }
                peak[i] = m;
            } catch (const BlowUpError&) {
                blew[i] = 1;
            }
        });
        for (int b : blew)
            if (b) return false;
        level.push_back(summarize(peak).mean);
    }
    double lo = level[0], hi = level[0];
    for (double x : level) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi / lo < 2.0;
}

// 7: deterministic manifold residual scales as the fifth power of the
// amplitude and is tiny at a = 0.1
bool deterministic_residual() {
    SsmParams p;
    p.nu = 1e-3;
    p.sigma = 0.0;
    const ResidualReport rep = residual_deterministic(p, {0.2, 0.1, 0.05});
    return std::abs(rep.slope - 5.0) <= 0.3 && rep.norms[1] < 1e-5;
}

// 8: the stiff pair integrator follows the reduced amplitude ODE
bool homotopy_tracks_ode() {
    SsmParams p;
    p.nu = 1e-3;
    p.gamma = 1.0;
    p.beta_prime = 0.2;
    p.sigma = 0.0;
    const double dt = 1e-4, a0 = 0.2;
    const int n = 10000;
    auto adot = [&](double a) { return p.beta_prime * a - 0.75 * a * a * a; };
    SpectralField u(SineBasis{5, Normalization::PlainSin}), v(u.basis);
    u.c[0] = a0;
    u.c[2] = a0 * a0 * a0 / 32.0;
    v.c[0] = adot(a0);
    v.c[2] = (3.0 / 32.0) * a0 * a0 * adot(a0) + mu(3) * u.c[2];
    const HomotopyIntegrator integ(p, dt);
    RngStream rng(7001, 0, "acc-ode");
    double a = a0;
    for (int i = 0; i < n; ++i) {
        integ.step(u, v, rng);
        const double k1 = adot(a), k2 = adot(a + 0.5 * dt * k1);
        const double k3 = adot(a + 0.5 * dt * k2), k4 = adot(a + dt * k3);
        a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return std::abs(u.c[0] - a) <= 0.01 * std::abs(a);
}

// 9: the averaged slow model is the nu-free evaluation of the full slow
// model, bitwise, over random parameters and noise states
bool slow_models_identical() {
    RngStream rng(8001, 0, "acc-ident");
    for (int i = 0; i < 10000; ++i) {
        SsmParams p;
        p.nu = 1e-12 + 0.5 * rng.uniform();
        p.gamma = rng.uniform();
        p.beta_prime = 0.2 * (rng.uniform() - 0.5);
        p.sigma = rng.uniform();
        p.amps = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(),
                  rng.uniform()};
        OuBank bank(p, 0.01);
        bank.step(rng);
        const double a = 0.4 * (rng.uniform() - 0.5);
        SsmParams p0 = p;
        p0.nu = 0.0;  // evaluation only
        if (averaged_ssm_drift_diffusion(a, p, bank) !=
            ssm_drift_diffusion(a, p0, bank))
            return false;
    }
    return true;
}

// 10: the stochastic manifold residual of the linearized pair decays
// faster than nu^1.5
bool linear_noise_residual() {
    SsmParams p;
    p.gamma = 1.0;
    p.beta_prime = 0.0;
    p.sigma = 0.1;
    p.amps = {1.0, 0.8, 0.6, 0.4, 0.2};
    const ResidualReport rep =
        residual_linear_noise(p, {0.02, 0.01, 0.005}, 0.1, 20000, 3000, 424242);
    return rep.slope >= 1.5;
}

}  // namespace

int main() {
    report(1, "fast process stationary law (mean 3 SE, variance 5%)",
           fast_stationary_law());
    report(2, "martingale quadratic variation rate (10%, r2 > 0.99)",
           martingale_qv_rate());
    const WeakTable t_half = weak_error_table(0.5, 3001);
    report(3, "weak error order at alpha = 1/2 (rate >= 0.4, r2 >= 0.9)",
           weak_error_order_half(t_half));
    const WeakTable t_zero = weak_error_table(0.0, 4001);
    report(4, "weak error shrinks at alpha = 0 (separated intervals)",
           weak_error_alpha_zero(t_zero));
    report(5, "exact and Euler-Maruyama terminal laws match (KS 5%)",
           scheme_distributional_match());
    report(6, "uniform H1 energy bound across nu (ratio < 2, no blow-up)",
           uniform_energy_bound());
    report(7, "deterministic manifold residual order 5 (+-0.3, <1e-5 at 0.1)",
           deterministic_residual());
    report(8, "homotopy integrator tracks the amplitude ODE (1%)",
           homotopy_tracks_ode());
    report(9, "averaged slow model bitwise equals the nu-free slow model",
           slow_models_identical());
    report(10, "linear-noise manifold residual slope >= 1.5",
           linear_noise_residual());
    return failures == 0 ? 0 : 1;
}
