#include "awl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace awl {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("AWL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

SummaryStats summarize(const std::vector<double>& xs) {
    SummaryStats s;
    s.n = xs.size();
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / (s.n - 1);
        s.std_error = std::sqrt(s.variance / s.n);
    }
    return s;
}

std::vector<double> martingale_process(const WaveTrajectory& traj,
                                       const SpectralField& phi, double nu,
                                       double beta) {
    const std::size_t n = traj.times.size();
    if (n < 10)
        throw std::invalid_argument(
            "martingale_process: need at least 10 recorded samples");
    if (traj.u.empty() || traj.u[0].basis != phi.basis)
        throw SizingError("martingale_process: phi basis mismatch");
    const int K = phi.basis.K;
    const Grid grid(3 * K + 1);
    const double scale = 1.0 / std::sqrt(nu);
    const double u0_phi = inner(traj.u[0], phi);

    std::vector<double> out(n, 0.0);
    double integral = 0.0;
    auto integrand = [&](std::size_t i) {
        const SpectralField f = cubic_f(traj.u[i], beta, grid);
        return grad_inner(traj.u[i], phi) - inner(f, phi);
    };
    double prev = integrand(0);
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = integrand(i);
        integral += 0.5 * (traj.times[i] - traj.times[i - 1]) * (prev + cur);
        prev = cur;
        out[i] = scale * (inner(traj.u[i], phi) - u0_phi + integral);
    }
    return out;
}

QvSeries realized_qv(const std::vector<double>& times,
                     const std::vector<double>& m, int window) {
    if (times.size() != m.size())
        throw std::invalid_argument("realized_qv: length mismatch");
    if (window < 1) throw std::invalid_argument("realized_qv: window must be >= 1");
    const std::size_t nwin = (m.size() - 1) / window;
    if (nwin < 2)
        throw std::invalid_argument("realized_qv: fewer than two windows");
    QvSeries out;
    out.times.reserve(nwin);
    out.qv.reserve(nwin);
    double acc = 0.0;
    for (std::size_t w = 0; w < nwin; ++w) {
        const double dm = m[(w + 1) * window] - m[w * window];
        acc += dm * dm;
        out.times.push_back(times[(w + 1) * window]);
        out.qv.push_back(acc);
    }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate x");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

StationaryStats stationary_stats(const std::vector<double>& samples, double dt,
                                 double nu) {
    if (samples.size() < 2)
        throw std::invalid_argument("stationary_stats: need >= 2 samples");
    if (!(dt > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("stationary_stats: dt, nu must be > 0");
    StationaryStats s;
    s.n = samples.size();
    double sum = 0.0;
    for (double x : samples) sum += x;
    s.mean = sum / s.n;
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / (s.n - 1);
    const double rho = std::exp(-dt / nu);
    s.ess = s.n * (1.0 - rho) / (1.0 + rho);
    return s;
}

OrderFit order_fit(const std::vector<WeakErrorRow>& rows) {
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        if (!r.conclusive) continue;
        if (!(r.nu > 0.0) || !(r.error > 0.0))
            throw std::invalid_argument("order_fit: conclusive row not positive");
        lx.push_back(std::log(r.nu));
        ly.push_back(std::log(r.error));
    }
    if (lx.size() < 3)
        throw std::invalid_argument(
            "order_fit: fewer than 3 conclusive rows, refusing to fit");
    const LineFit f = fit_line(lx, ly);
    return {f.slope, f.r2, static_cast<int>(lx.size())};
}

KsResult ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    KsResult r;
    r.d = d;
    r.threshold = 1.358 * std::sqrt((na + nb) / (na * nb));
    r.reject = d > r.threshold;
    return r;
}

}  // namespace awl
