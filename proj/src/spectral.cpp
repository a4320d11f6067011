#include "awl/spectral.hpp"

#include <algorithm>

namespace awl {

SineTransform::SineTransform(int K, const Grid& grid)
    : K_(K), grid_(grid), sin_(static_cast<size_t>(K) * grid.M) {
    if (K <= 0) throw SizingError("SineTransform: K must be positive");
    if (grid.M < K)
        throw SizingError("SineTransform: grid M=" + std::to_string(grid.M) +
                          " smaller than K=" + std::to_string(K));
    for (int k = 1; k <= K; ++k)
        for (int j = 0; j < grid.M; ++j)
            sin_[(k - 1) * static_cast<size_t>(grid.M) + j] =
                std::sin(k * grid.nodes[j]);
}

void SineTransform::synthesize(const SpectralField& f,
                               std::vector<double>& values) const {
    if (f.basis.K > K_)
        throw SizingError("synthesize: field K exceeds transform K");
    const double scale = f.basis.norm == Normalization::Orthonormal
                             ? std::sqrt(2.0 / std::numbers::pi)
                             : 1.0;
    const int M = grid_.M;
    values.assign(M, 0.0);
    for (int k = 1; k <= f.basis.K; ++k) {
        const double a = scale * f.c[k - 1];
        if (a == 0.0) continue;
        const double* row = &sin_[(k - 1) * static_cast<size_t>(M)];
        for (int j = 0; j < M; ++j) values[j] += a * row[j];
    }
}

SpectralField SineTransform::analyze(const std::vector<double>& values,
                                     SineBasis basis) const {
    if (static_cast<int>(values.size()) != grid_.M)
        throw SizingError("analyze: value count != grid M");
    if (basis.K > K_)
        throw SizingError("analyze: target K exceeds transform K");
    // sum_j sin(k x_j) sin(l x_j) = (M+1)/2 * delta_kl for k,l <= M
    const int M = grid_.M;
    const double w = 2.0 / (M + 1);
    const double scale = basis.norm == Normalization::Orthonormal
                             ? std::sqrt(std::numbers::pi / 2.0)
                             : 1.0;
    SpectralField out(basis);
    for (int k = 1; k <= basis.K; ++k) {
        const double* row = &sin_[(k - 1) * static_cast<size_t>(M)];
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += values[j] * row[j];
        out.c[k - 1] = scale * w * s;
    }
    return out;
}

std::vector<double> synthesize(const SpectralField& f, const Grid& grid) {
    SineTransform dst(f.basis.K, grid);
    std::vector<double> values;
    dst.synthesize(f, values);
    return values;
}

SpectralField analyze(const std::vector<double>& values, const Grid& grid,
                      SineBasis basis) {
    SineTransform dst(basis.K, grid);
    return dst.analyze(values, basis);
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out = f;
    for (int k = 1; k <= f.basis.K; ++k)
        out.c[k - 1] *= -SineBasis::lambda(k);
    return out;
}

double sobolev_norm(const SpectralField& f, double s) {
    if (f.basis.norm != Normalization::Orthonormal)
        throw std::invalid_argument("sobolev_norm: orthonormal basis required");
    double acc = 0.0;
    for (int k = 1; k <= f.basis.K; ++k) {
        const double ck = f.c[k - 1];
        acc += std::pow(SineBasis::lambda(k), s) * ck * ck;
    }
    return std::sqrt(acc);
}

SpectralField cubic_f(const SpectralField& f, double beta,
                      const SineTransform& dst) {
    if (dst.grid().M < 3 * f.basis.K + 1)
        throw SizingError("cubic_f: dealiasing requires M >= 3K+1");
    std::vector<double> v;
    dst.synthesize(f, v);
    for (double& x : v) x = x * x * x;
    SpectralField cube = dst.analyze(v, f.basis);
    SpectralField out = f;
    for (int i = 0; i < f.basis.K; ++i)
        out.c[i] = beta * f.c[i] - cube.c[i];
    return out;
}

SpectralField cubic_f(const SpectralField& f, double beta, const Grid& grid) {
    return cubic_f(f, beta, SineTransform(f.basis.K, grid));
}

static void check_same_basis(const SpectralField& a, const SpectralField& b) {
    if (!(a.basis == b.basis))
        throw std::invalid_argument("inner: basis mismatch");
    if (a.basis.norm != Normalization::Orthonormal)
        throw std::invalid_argument("inner: orthonormal basis required");
}

double inner(const SpectralField& a, const SpectralField& b) {
    check_same_basis(a, b);
    double s = 0.0;
    for (int i = 0; i < a.basis.K; ++i) s += a.c[i] * b.c[i];
    return s;
}

double grad_inner(const SpectralField& a, const SpectralField& b) {
    check_same_basis(a, b);
    double s = 0.0;
    for (int k = 1; k <= a.basis.K; ++k)
        s += SineBasis::lambda(k) * a.c[k - 1] * b.c[k - 1];
    return s;
}

SpectralField to_orthonormal(const SpectralField& f) {
    if (f.basis.norm == Normalization::Orthonormal) return f;
    SpectralField out = f;
    out.basis.norm = Normalization::Orthonormal;
    const double s = std::sqrt(std::numbers::pi / 2.0);
    for (double& x : out.c) x *= s;
    return out;
}

SpectralField to_plain(const SpectralField& f) {
    if (f.basis.norm == Normalization::PlainSin) return f;
    SpectralField out = f;
    out.basis.norm = Normalization::PlainSin;
    const double s = std::sqrt(2.0 / std::numbers::pi);
    for (double& x : out.c) x *= s;
    return out;
}

}  // namespace awl
