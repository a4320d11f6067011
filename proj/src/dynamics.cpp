#include "awl/dynamics.hpp"

#include <cmath>

namespace awl {

namespace {

double noise_b(const NoiseModel& m, int k) {
    return k <= m.K() ? m.b[k - 1] : 0.0;
}

Mat2 mode_matrix(double lambda, double nu) {
    return {0.0, 1.0, -lambda / nu, -1.0 / nu};
}

int step_count(const WaveParams& p) {
    const double raw = p.T / p.dt;
    const int n = static_cast<int>(std::llround(raw));
    if (n < 1 || std::abs(n - raw) > 1e-6 * raw)
        throw std::invalid_argument("T must be a whole number of steps dt");
    return n;
}

}  // namespace

void WaveParams::validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(T >= dt)) throw std::invalid_argument("T must be >= dt");
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
    noise.validate();
    if (scheme == Scheme::EulerMaruyama && dt > nu / 20.0 * (1.0 + 1e-12))
        throw std::invalid_argument(
            "euler-maruyama requires dt <= nu/20 for the fast variable");
}

ModePropagator build_propagator(double lambda, double nu, double alpha,
                                double b, double h) {
    const Mat2 A = mode_matrix(lambda, nu);
    const double g = std::pow(nu, alpha - 1.0) * std::sqrt(b);
    ModePropagator mp;
    mp.E = expm(A, h);
    mp.F = phi1(A, h);
    if (b > 0.0) {
        // near the critically damped double root the closed-form kernel
        // coefficients lose accuracy, so integrate the covariance numerically
        if (std::abs(1.0 - 4.0 * nu * lambda) < 1e-6)
            mp.Sigma = conv_cov_quadrature(A, g, h);
        else
            mp.Sigma = conv_cov(A, g, h);
        mp.l11 = mp.Sigma[0] > 0.0 ? std::sqrt(mp.Sigma[0]) : 0.0;
        mp.l21 = mp.l11 > 0.0 ? mp.Sigma[1] / mp.l11 : 0.0;
        const double r = mp.Sigma[2] - mp.l21 * mp.l21;
        mp.l22 = r > 0.0 ? std::sqrt(r) : 0.0;
    }
    return mp;
}

WaveIntegrator::WaveIntegrator(const WaveParams& p)
    : p_(p), dst_(p.K, Grid(3 * p.K + 1)) {
    p_.validate();
    if (p_.scheme == Scheme::StiffExact) {
        props_.reserve(p_.K);
        for (int k = 1; k <= p_.K; ++k)
            props_.push_back(build_propagator(SineBasis::lambda(k), p_.nu,
                                              p_.noise.alpha,
                                              noise_b(p_.noise, k), p_.dt));
    }
}

void WaveIntegrator::step(WaveState& s, RngStream& rng) const {
    if (p_.scheme == Scheme::StiffExact)
        step_stiff_exact(s, rng);
    else
        step_euler_maruyama(s, rng);
    if (!s.finite()) throw BlowUpError();
}

void WaveIntegrator::step_stiff_exact(WaveState& s, RngStream& rng) const {
    const SpectralField f = cubic_f(s.u, p_.beta, dst_);
    for (int k = 1; k <= p_.K; ++k) {
        const ModePropagator& mp = props_[k - 1];
        Vec2 x{s.u.c[k - 1], s.v.c[k - 1]};
        x = mp.E.apply(x);
        const double fk = f.c[k - 1] / p_.nu;
        x.x += mp.F.a12 * fk;
        x.y += mp.F.a22 * fk;
        if (mp.l11 > 0.0 || mp.l22 > 0.0) {
            const double z1 = rng.gaussian(), z2 = rng.gaussian();
            x.x += mp.l11 * z1;
            x.y += mp.l21 * z1 + mp.l22 * z2;
        }
        s.u.c[k - 1] = x.x;
        s.v.c[k - 1] = x.y;
    }
}

void WaveIntegrator::step_euler_maruyama(WaveState& s, RngStream& rng) const {
    const SpectralField f = cubic_f(s.u, p_.beta, dst_);
    const double h = p_.dt;
    const double gscale = std::pow(p_.nu, p_.noise.alpha - 1.0);
    for (int k = 1; k <= p_.K; ++k) {
        const double lam = SineBasis::lambda(k);
        const double u = s.u.c[k - 1], v = s.v.c[k - 1];
        s.u.c[k - 1] = u + h * v;
        double vn = v - (h / p_.nu) * (v + lam * u - f.c[k - 1]);
        const double b = noise_b(p_.noise, k);
        if (b > 0.0) vn += gscale * std::sqrt(b * h) * rng.gaussian();
        s.v.c[k - 1] = vn;
    }
}

WaveTrajectory WaveIntegrator::simulate(const SpectralField& u0,
                                        const SpectralField& u1,
                                        RngStream& rng,
                                        int record_every) const {
    const SineBasis basis{p_.K, Normalization::Orthonormal};
    if (u0.basis != basis || u1.basis != basis)
        throw SizingError("simulate: initial data must be orthonormal with K modes");
    const int n = step_count(p_);
    WaveState s{u0, u1};
    WaveTrajectory out;
    out.times.push_back(0.0);
    out.u.push_back(s.u);
    out.v.push_back(s.v);
    for (int i = 1; i <= n; ++i) {
        try {
            step(s, rng);
        } catch (const BlowUpError&) {
            throw BlowUpError(i * p_.dt);
        }
        if (i % record_every == 0 || i == n) {
            out.times.push_back(i * p_.dt);
            out.u.push_back(s.u);
            out.v.push_back(s.v);
        }
    }
    return out;
}

AveragedIntegrator::AveragedIntegrator(const WaveParams& p)
    : p_(p), dst_(p.K, Grid(3 * p.K + 1)) {
    p_.validate();
    decay_.resize(p_.K);
    fweight_.resize(p_.K);
    nstd_.resize(p_.K);
    const double ascale = std::pow(p_.nu, p_.noise.alpha);
    for (int k = 1; k <= p_.K; ++k) {
        const double lam = SineBasis::lambda(k);
        const double d = std::exp(-lam * p_.dt);
        decay_[k - 1] = d;
        fweight_[k - 1] = (1.0 - d) / lam;
        const double b = noise_b(p_.noise, k);
        nstd_[k - 1] = ascale * std::sqrt(b * (1.0 - d * d) / (2.0 * lam));
    }
}

void AveragedIntegrator::apply_drift(SpectralField& u) const {
    const SpectralField f = cubic_f(u, p_.beta, dst_);
    for (int k = 0; k < p_.K; ++k)
        u.c[k] = decay_[k] * u.c[k] + fweight_[k] * f.c[k];
}

void AveragedIntegrator::step(SpectralField& u, RngStream& rng) const {
    apply_drift(u);
    for (int k = 0; k < p_.K; ++k)
        if (nstd_[k] > 0.0) u.c[k] += nstd_[k] * rng.gaussian();
    if (!u.finite()) throw BlowUpError();
}

WaveTrajectory AveragedIntegrator::simulate(const SpectralField& u0,
                                            RngStream& rng,
                                            int record_every) const {
    const SineBasis basis{p_.K, Normalization::Orthonormal};
    if (u0.basis != basis)
        throw SizingError("simulate: initial data must be orthonormal with K modes");
    const int n = step_count(p_);
    SpectralField u = u0;
    WaveTrajectory out;
    out.times.push_back(0.0);
    out.u.push_back(u);
    for (int i = 1; i <= n; ++i) {
        try {
            step(u, rng);
        } catch (const BlowUpError&) {
            throw BlowUpError(i * p_.dt);
        }
        if (i % record_every == 0 || i == n) {
            out.times.push_back(i * p_.dt);
            out.u.push_back(u);
        }
    }
    return out;
}

CoupledPair::CoupledPair(const WaveParams& p)
    : p_(p), wave_(p), avg_(p) {
    if (p_.scheme != Scheme::StiffExact)
        throw std::invalid_argument("coupled pair runs on the stiff-exact scheme");
    joint_.reserve(p_.K);
    const double gscale = std::pow(p_.nu, p_.noise.alpha - 1.0);
    const double ascale = std::pow(p_.nu, p_.noise.alpha);
    for (int k = 1; k <= p_.K; ++k) {
        const double lam = SineBasis::lambda(k);
        const double b = noise_b(p_.noise, k);
        const double sb = std::sqrt(b);
        auto [k1, k2] = impulse_kernels(mode_matrix(lam, p_.nu), gscale * sb);
        ExpSum ka = ExpSum::exponential(ascale * sb, lam);
        joint_.emplace_back(std::vector<ExpSum>{k1, k2, ka}, p_.dt);
    }
}

void CoupledPair::step(WaveState& full, SpectralField& avg,
                       RngStream& rng) const {
    const SpectralField f = cubic_f(full.u, p_.beta, wave_.dst_);
    avg_.apply_drift(avg);
    for (int k = 1; k <= p_.K; ++k) {
        const ModePropagator& mp = wave_.props_[k - 1];
        Vec2 x{full.u.c[k - 1], full.v.c[k - 1]};
        x = mp.E.apply(x);
        const double fk = f.c[k - 1] / p_.nu;
        x.x += mp.F.a12 * fk;
        x.y += mp.F.a22 * fk;
        double noise[3];
        joint_[k - 1].sample([&] { return rng.gaussian(); }, noise);
        full.u.c[k - 1] = x.x + noise[0];
        full.v.c[k - 1] = x.y + noise[1];
        avg.c[k - 1] += noise[2];
    }
    if (!full.finite() || !avg.finite()) throw BlowUpError();
}

std::pair<WaveState, SpectralField> CoupledPair::run(const SpectralField& u0,
                                                     const SpectralField& u1,
                                                     RngStream& rng) const {
    const int n = step_count(p_);
    WaveState full{u0, u1};
    SpectralField avg = u0;
    for (int i = 1; i <= n; ++i) {
        try {
            step(full, avg, rng);
        } catch (const BlowUpError&) {
            throw BlowUpError(i * p_.dt);
        }
    }
    return {full, avg};
}

FastTrajectory simulate_fast_frozen(const WaveParams& p,
                                    const SpectralField& u_frozen,
                                    const SpectralField& v0, RngStream& rng,
                                    int record_every) {
    p.validate();
    const SineBasis basis{p.K, Normalization::Orthonormal};
    if (u_frozen.basis != basis || v0.basis != basis)
        throw SizingError("fast frozen: fields must be orthonormal with K modes");
    const Grid grid(3 * p.K + 1);
    SpectralField mean = laplacian(u_frozen);
    {
        const SpectralField f = cubic_f(u_frozen, p.beta, grid);
        for (int k = 0; k < p.K; ++k) mean.c[k] += f.c[k];
    }
    const double mu = 1.0 / p.nu;
    const double gscale = std::pow(p.nu, p.noise.alpha - 1.0);
    const int n = step_count(p);

    FastTrajectory out;
    out.mean_target = mean;
    SpectralField v = v0;
    out.times.push_back(0.0);
    out.v.push_back(v);
    for (int i = 1; i <= n; ++i) {
        for (int k = 1; k <= p.K; ++k) {
            const double diff = gscale * std::sqrt(noise_b(p.noise, k));
            v.c[k - 1] = ou_exact_step(v.c[k - 1], mu, mean.c[k - 1], p.dt,
                                       diff, rng);
        }
        if (!v.finite()) throw BlowUpError(i * p.dt);
        if (i % record_every == 0 || i == n) {
            out.times.push_back(i * p.dt);
            out.v.push_back(v);
        }
    }
    return out;
}

WaveState scale_transform(const WaveState& s, double nu, double alpha,
                          ScaleDirection dir) {
    if (!(nu > 0.0)) throw std::invalid_argument("scale_transform: nu must be > 0");
    double factor = std::pow(nu, 0.5 - alpha);
    if (dir == ScaleDirection::Backward) factor = 1.0 / factor;
    WaveState out = s;
    for (double& c : out.u.c) c *= factor;
    for (double& c : out.v.c) c *= factor;
    return out;
}

}  // namespace awl
