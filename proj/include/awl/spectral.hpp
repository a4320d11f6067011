#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

// Sine-basis fields on (0,pi) with homogeneous Dirichlet conditions.
// Mode k has eigenvalue lambda_k = k^2 of A = -Laplacian.

namespace awl {

class SizingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Normalization {
    Orthonormal,  // e_k = sqrt(2/pi) sin(kx), <e_j,e_k> = delta_jk
    PlainSin      // sin(kx)
};

struct SineBasis {
    int K = 0;
    Normalization norm = Normalization::Orthonormal;

    static double lambda(int k) { return static_cast<double>(k) * k; }

    // amplitude of basis function k at x
    double eval(int k, double x) const {
        const double s = std::sin(k * x);
        return norm == Normalization::Orthonormal
                   ? std::sqrt(2.0 / std::numbers::pi) * s
                   : s;
    }

    bool operator==(const SineBasis&) const = default;
};

struct SpectralField {
    SineBasis basis;
    std::vector<double> c;  // mode amplitudes, c[k-1] for mode k

    SpectralField() = default;
    explicit SpectralField(SineBasis b) : basis(b), c(b.K, 0.0) {}
    SpectralField(SineBasis b, std::vector<double> coeffs)
        : basis(b), c(std::move(coeffs)) {
        if (static_cast<int>(c.size()) != basis.K)
            throw SizingError("SpectralField: coefficient count != K");
    }

    bool finite() const {
        for (double x : c)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

// Collocation nodes x_j = j*pi/(M+1), j=1..M.  DST-I quadrature on these
// nodes is exact for band-limited integrands, which is what makes
// analyze a left-inverse of synthesize.
struct Grid {
    int M = 0;
    std::vector<double> nodes;

    explicit Grid(int m) : M(m), nodes(m) {
        if (m <= 0) throw SizingError("Grid: M must be positive");
        for (int j = 1; j <= m; ++j)
            nodes[j - 1] = j * std::numbers::pi / (m + 1);
    }
};

// Cached sine table for repeated synthesize/analyze on one (K, M) pair.
class SineTransform {
public:
    SineTransform(int K, const Grid& grid);

    int K() const { return K_; }
    const Grid& grid() const { return grid_; }

    void synthesize(const SpectralField& f, std::vector<double>& values) const;
    SpectralField analyze(const std::vector<double>& values, SineBasis basis) const;

private:
    int K_;
    Grid grid_;
    std::vector<double> sin_;  // sin(k x_j), row-major [k-1][j-1]
};

std::vector<double> synthesize(const SpectralField& f, const Grid& grid);
SpectralField analyze(const std::vector<double>& values, const Grid& grid,
                      SineBasis basis);

SpectralField laplacian(const SpectralField& f);

// ||u||_s = sqrt(sum lambda_k^s c_k^2); requires orthonormal normalization.
double sobolev_norm(const SpectralField& f, double s);

// Galerkin projection of beta*u - u^3 onto the first K modes.
// Exact (no aliasing) when the transform grid has M >= 3K+1.
SpectralField cubic_f(const SpectralField& f, double beta,
                      const SineTransform& dst);
SpectralField cubic_f(const SpectralField& f, double beta, const Grid& grid);

double inner(const SpectralField& a, const SpectralField& b);
double grad_inner(const SpectralField& a, const SpectralField& b);

// Plain-sin amplitude p_k equals orthonormal amplitude c_k / sqrt(pi/2).
SpectralField to_orthonormal(const SpectralField& f);
SpectralField to_plain(const SpectralField& f);

}  // namespace awl
