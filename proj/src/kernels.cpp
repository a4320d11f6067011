#include "awl/kernels.hpp"

#include <algorithm>

namespace awl {

void jacobi_eigh(std::vector<double>& a, int n, std::vector<double>& eigvals,
                 std::vector<double>& eigvecs) {
    eigvecs.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) eigvecs[i * n + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a[i * n + p], aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = a[p * n + i], aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = eigvecs[i * n + p], viq = eigvecs[i * n + q];
                    eigvecs[i * n + p] = c * vip - s * viq;
                    eigvecs[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    eigvals.resize(n);
    for (int i = 0; i < n; ++i) eigvals[i] = a[i * n + i];
}

JointGaussian::JointGaussian(const std::vector<ExpSum>& kernels, double h)
    : n_(static_cast<int>(kernels.size())),
      cov_(static_cast<size_t>(n_) * n_),
      factor_(static_cast<size_t>(n_) * n_, 0.0) {
    if (!(h > 0.0)) throw std::invalid_argument("JointGaussian: h must be > 0");
    if (n_ > kMaxDim)
        throw std::invalid_argument("JointGaussian: too many kernels");
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            const double v = integrate(kernels[i] * kernels[j], h);
            cov_[i * n_ + j] = v;
            cov_[j * n_ + i] = v;
        }
    // factor via eigendecomposition; clamps tiny negative eigenvalues that
    // arise when kernels are (numerically) linearly dependent
    std::vector<double> work = cov_, vals, vecs;
    jacobi_eigh(work, n_, vals, vecs);
    double vmax = 0.0;
    for (double v : vals) vmax = std::max(vmax, v);
    for (int j = 0; j < n_; ++j) {
        const double lam = vals[j];
        const double s = lam > 1e-14 * vmax ? std::sqrt(lam) : 0.0;
        for (int i = 0; i < n_; ++i) factor_[i * n_ + j] = vecs[i * n_ + j] * s;
    }
}

}  // namespace awl
