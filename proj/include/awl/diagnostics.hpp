#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "awl/dynamics.hpp"
#include "awl/spectral.hpp"

namespace awl {

// Picks the worker count: explicit request wins, then the AWL_THREADS
// environment variable, then hardware concurrency.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) across a thread pool.  Each index owns its
// own output slot and random stream, so results are identical for any
// thread count.
template <class F>
void run_indexed(std::size_t n, int threads, F&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nt = static_cast<int>(std::min<std::size_t>(threads, n));
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load(std::memory_order_relaxed)) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    break;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

struct SummaryStats {
    double mean = 0.0;
    double variance = 0.0;   // unbiased sample variance
    double std_error = 0.0;  // of the mean
    std::size_t n = 0;
};

SummaryStats summarize(const std::vector<double>& xs);

// The compensated test-functional process
//   M(t) = nu^{-1/2} { <u(t)-u(0), phi> + int_0^t [<grad u, grad phi> - <f(u), phi>] ds },
// evaluated by trapezoid rule on the recorded trajectory.  Under the full
// dynamics M(t) differs from the projected Wiener path W^phi(t) by a
// boundary term of size sqrt(nu) |v^phi(t) - v^phi(0)|.
std::vector<double> martingale_process(const WaveTrajectory& traj,
                                       const SpectralField& phi, double nu,
                                       double beta);

// Realized quadratic variation with a coarse window of `window` recorded
// steps: QV(t_j) = sum of squared windowed increments up to t_j.
struct QvSeries {
    std::vector<double> times;
    std::vector<double> qv;
};
QvSeries realized_qv(const std::vector<double>& times,
                     const std::vector<double>& m, int window);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Time-average statistics of a stationary scalar series whose
// autocorrelation time is nu; the effective sample size uses the AR(1)
// correction rho = exp(-dt/nu).
struct StationaryStats {
    double mean = 0.0;
    double variance = 0.0;
    double ess = 0.0;
    std::size_t n = 0;
};
StationaryStats stationary_stats(const std::vector<double>& samples, double dt,
                                 double nu);

// One row of a weak-error table.  A row is conclusive when the measured
// gap exceeds twice its standard error.
struct WeakErrorRow {
    double nu = 0.0;
    double error = 0.0;
    double std_error = 0.0;
    bool conclusive = false;
};

// Least-squares exponent of error ~ C nu^rate over the conclusive rows.
struct OrderFit {
    double rate = 0.0;
    double r2 = 0.0;
    int rows_used = 0;
};
OrderFit order_fit(const std::vector<WeakErrorRow>& rows);

// Two-sample Kolmogorov-Smirnov distance with the 5% asymptotic threshold
// 1.358 sqrt((n+m)/(n m)).
struct KsResult {
    double d = 0.0;
    double threshold = 0.0;
    bool reject = false;
};
KsResult ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace awl
