#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace awl {

// Linear combinations of c * tau^p * exp(-rho * tau) with complex c, rho.
// Every stochastic integral appearing in the exact one-step updates
// (Wiener increments, OU innovations, iterated cascades, time-integrated
// states, damped-wave convolutions) has a kernel of this form, so their
// joint one-step covariance is available in closed form.
struct ExpSum {
    struct Term {
        std::complex<double> c;
        int p;                    // polynomial power, kept small
        std::complex<double> rho; // decay rate
    };
    std::vector<Term> terms;

    static ExpSum constant(double c) { return ExpSum{{{c, 0, 0.0}}}; }
    static ExpSum exponential(double c, std::complex<double> rho) {
        return ExpSum{{{c, 0, rho}}};
    }

    ExpSum& add(std::complex<double> c, int p, std::complex<double> rho) {
        terms.push_back({c, p, rho});
        return *this;
    }

    ExpSum operator*(const ExpSum& o) const {
        ExpSum out;
        out.terms.reserve(terms.size() * o.terms.size());
        for (const auto& a : terms)
            for (const auto& b : o.terms)
                out.terms.push_back({a.c * b.c, a.p + b.p, a.rho + b.rho});
        return out;
    }

    std::complex<double> eval(double tau) const {
        std::complex<double> s = 0.0;
        for (const auto& t : terms)
            s += t.c * std::pow(tau, t.p) * std::exp(-t.rho * tau);
        return s;
    }
};

// int_0^h tau^p exp(-rho tau) dtau, stable for small |rho h| via series.
inline std::complex<double> exp_moment(int p, std::complex<double> rho,
                                       double h) {
    const std::complex<double> x = rho * h;
    if (std::abs(x) < 0.25) {
        // h^{p+1} sum_n (-x)^n / (n! (p+n+1))
        std::complex<double> term = 1.0, sum = 1.0 / (p + 1);
        for (int n = 1; n < 40; ++n) {
            term *= -x / static_cast<double>(n);
            const std::complex<double> add = term / static_cast<double>(p + n + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return std::pow(h, p + 1) * sum;
    }
    // F_0 = (1 - e^{-x})/rho;  F_p = (p F_{p-1} - h^p e^{-x}) / rho
    const std::complex<double> e = std::exp(-x);
    std::complex<double> f = (1.0 - e) / rho;
    double hp = 1.0;
    for (int q = 1; q <= p; ++q) {
        hp *= h;
        f = (static_cast<double>(q) * f - hp * e) / rho;
    }
    return f;
}

inline double integrate(const ExpSum& k, double h) {
    std::complex<double> s = 0.0;
    for (const auto& t : k.terms) s += t.c * exp_moment(t.p, t.rho, h);
    return s.real();
}

// Symmetric eigendecomposition by cyclic Jacobi; fine for the small
// matrices used here (<= ~10 x 10).
void jacobi_eigh(std::vector<double>& a, int n, std::vector<double>& eigvals,
                 std::vector<double>& eigvecs);

// Samples a zero-mean Gaussian vector whose covariance is the Gram matrix
// C_ij = int_0^h k_i(tau) k_j(tau) dtau of the supplied kernels.
class JointGaussian {
public:
    JointGaussian(const std::vector<ExpSum>& kernels, double h);

    int dim() const { return n_; }
    const std::vector<double>& covariance() const { return cov_; }

    // fills out[0..n) from iid standard normals produced by `draw`;
    // safe to call concurrently
    template <class Draw>
    void sample(Draw&& draw, double* out) const {
        double z[kMaxDim];
        for (int i = 0; i < n_; ++i) z[i] = draw();
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += factor_[i * n_ + j] * z[j];
            out[i] = s;
        }
    }

    static constexpr int kMaxDim = 16;

private:
    int n_;
    std::vector<double> cov_;    // n x n, row-major
    std::vector<double> factor_; // L with L L^T = cov
};

}  // namespace awl
