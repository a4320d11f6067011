#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "awl/rng.hpp"
#include "awl/spectral.hpp"

namespace awl {

// Diagonal covariance of the Q-Wiener process: Q e_k = b_k e_k.
struct NoiseModel {
    std::vector<double> b;   // covariance eigenvalues, length K_noise
    double alpha = 0.5;      // noise exponent in [0, 1/2]

    NoiseModel() = default;
    explicit NoiseModel(std::vector<double> eigenvalues, double a = 0.5)
        : b(std::move(eigenvalues)), alpha(a) {
        validate();
    }

    // b_k = k^{-r}, truncated at K modes.  r > 3 keeps B_1 summable
    // even without truncation.
    static NoiseModel power_law(int K, double r = 4.0, double a = 0.5) {
        std::vector<double> b(K);
        for (int k = 1; k <= K; ++k) b[k - 1] = std::pow(k, -r);
        return NoiseModel(std::move(b), a);
    }

    int K() const { return static_cast<int>(b.size()); }

    void validate() const {
        if (alpha < 0.0 || alpha > 0.5)
            throw std::invalid_argument("NoiseModel: alpha outside [0, 1/2]");
        for (double bk : b)
            if (!(bk >= 0.0) || !std::isfinite(bk))
                throw std::invalid_argument("NoiseModel: b_k must be finite and >= 0");
    }
};

// (B_0, B_1) = (sum b_k, sum k^2 b_k) over the truncation.
inline std::pair<double, double> b_sums(const NoiseModel& m) {
    double b0 = 0.0, b1 = 0.0;
    for (int k = 1; k <= m.K(); ++k) {
        b0 += m.b[k - 1];
        b1 += SineBasis::lambda(k) * m.b[k - 1];
    }
    return {b0, b1};
}

// Increment of W(t) = sum sqrt(b_k) e_k w_k(t) over a step of length h:
// mode k gains an independent N(0, b_k h) amplitude.
inline SpectralField sample_wiener_increment(const NoiseModel& m, double h,
                                             RngStream& rng) {
    if (!(h > 0.0)) throw std::invalid_argument("wiener increment: h must be > 0");
    SpectralField dw(SineBasis{m.K(), Normalization::Orthonormal});
    for (int k = 0; k < m.K(); ++k)
        dw.c[k] = m.b[k] > 0.0 ? std::sqrt(m.b[k] * h) * rng.gaussian() : 0.0;
    return dw;
}

// Exact transition of dz = -mu (z - m) dt + diffusion dW over a step h:
// z' = m + e^{-mu h}(z - m) + N(0, diffusion^2 (1 - e^{-2 mu h}) / (2 mu)).
inline double ou_exact_step(double z, double mu, double m, double h,
                            double diffusion, RngStream& rng) {
    if (!(mu > 0.0)) throw std::invalid_argument("ou_exact_step: mu must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("ou_exact_step: h must be > 0");
    const double decay = std::exp(-mu * h);
    const double var = diffusion * diffusion * (1.0 - decay * decay) / (2.0 * mu);
    double out = m + decay * (z - m);
    if (var > 0.0) out += std::sqrt(var) * rng.gaussian();
    return out;
}

}  // namespace awl
