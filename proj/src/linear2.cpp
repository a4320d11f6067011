#include "awl/linear2.hpp"

#include <cmath>

namespace awl {

namespace {

using cd = std::complex<double>;

struct Split {
    double tbar;  // trace/2
    cd omega;     // sqrt(tbar^2 - det); real or purely imaginary
};

Split split(const Mat2& A) {
    const double tbar = 0.5 * A.trace();
    const cd om = std::sqrt(cd(tbar * tbar - A.det(), 0.0));
    return {tbar, om};
}

// cosh(omega h) and sinh(omega h)/omega, by series when |omega h| is small
void cosh_sinhc(cd omega, double h, double& c, double& s) {
    const cd x = omega * h;
    if (std::abs(x) < 1e-3) {
        const cd x2 = x * x;
        cd cc = 1.0, term = 1.0;
        for (int n = 1; n <= 6; ++n) {
            term *= x2 / static_cast<double>((2 * n) * (2 * n - 1));
            cc += term;
        }
        cd ss = 1.0;
        term = 1.0;
        for (int n = 1; n <= 6; ++n) {
            term *= x2 / static_cast<double>((2 * n) * (2 * n + 1));
            ss += term;
        }
        c = cc.real();
        s = (h * ss).real();
    } else {
        c = std::cosh(x).real();
        s = (std::sinh(x) / omega).real();
    }
}

}  // namespace

Mat2 expm(const Mat2& A, double h) {
    const Split sp = split(A);
    double c, s;
    cosh_sinhc(sp.omega, h, c, s);
    const double e = std::exp(sp.tbar * h);
    // e^{Ah} = e^{tbar h} [cosh(w h) I + sinh(w h)/w (A - tbar I)]
    return {e * (c + s * (A.a11 - sp.tbar)), e * s * A.a12,
            e * s * A.a21, e * (c + s * (A.a22 - sp.tbar))};
}

Mat2 phi1(const Mat2& A, double h) {
    const Split sp = split(A);
    const cd zp = sp.tbar + sp.omega, zm = sp.tbar - sp.omega;
    // c1 = int e^{tbar s} cosh(w s) ds, s1 = int e^{tbar s} sinh(w s)/w ds
    double c1, s1;
    if (std::abs(sp.omega * h) < 1e-3) {
        // series in omega^2: int s^{2n} e^{tbar s} / (2n)! and odd analogue
        const cd w2 = sp.omega * sp.omega;
        cd c1c = 0.0, s1c = 0.0, pw = 1.0;
        double fact_even = 1.0, fact_odd = 1.0;
        for (int n = 0; n <= 4; ++n) {
            if (n > 0) {
                pw *= w2;
                fact_even *= (2 * n - 1) * (2 * n);
                fact_odd *= (2 * n) * (2 * n + 1);
            }
            c1c += pw / fact_even * exp_moment(2 * n, -sp.tbar, h);
            s1c += pw / fact_odd * exp_moment(2 * n + 1, -sp.tbar, h);
        }
        c1 = c1c.real();
        s1 = s1c.real();
    } else {
        const cd ep = exp_moment(0, -zp, h);  // int_0^h e^{zp s} ds
        const cd em = exp_moment(0, -zm, h);
        c1 = (0.5 * (ep + em)).real();
        s1 = ((ep - em) / (2.0 * sp.omega)).real();
    }
    return {c1 + s1 * (A.a11 - sp.tbar), s1 * A.a12,
            s1 * A.a21, c1 + s1 * (A.a22 - sp.tbar)};
}

std::pair<ExpSum, ExpSum> impulse_kernels(const Mat2& A, double g) {
    const Split sp = split(A);
    ExpSum k1, k2;
    if (std::abs(sp.omega) < 1e-3 * std::max(1.0, std::abs(sp.tbar))) {
        // near-degenerate eigenvalues: polynomial-in-tau series,
        // e^{A tau} = e^{tbar tau} sum_n [cosh+sinhc] truncated
        const cd w2 = sp.omega * sp.omega;
        const cd mrho = cd(-sp.tbar);  // kernel rho = -tbar
        cd pw = 1.0;
        double fe = 1.0, fo = 1.0;
        for (int n = 0; n <= 5; ++n) {
            if (n > 0) {
                pw *= w2;
                fe *= (2 * n - 1) * (2 * n);
                fo *= (2 * n) * (2 * n + 1);
            }
            // K1 = g [cosh * 0 + sinhc * a12];  K2 = g [cosh + sinhc (a22 - tbar)]
            k1.add(g * A.a12 * pw / fo, 2 * n + 1, mrho);
            k2.add(g * pw / fe, 2 * n, mrho);
            k2.add(g * (A.a22 - sp.tbar) * pw / fo, 2 * n + 1, mrho);
        }
    } else {
        const cd zp = sp.tbar + sp.omega, zm = sp.tbar - sp.omega;
        const cd d = 2.0 * sp.omega;
        // e^{A tau}(0,1)^T = [e^{zp tau}(a12, a22-zm) - e^{zm tau}(a12, a22-zp)]/(zp-zm)
        k1.add(g * A.a12 / d, 0, -zp);
        k1.add(-g * A.a12 / d, 0, -zm);
        k2.add(g * (A.a22 - zm) / d, 0, -zp);
        k2.add(-g * (A.a22 - zp) / d, 0, -zm);
    }
    return {k1, k2};
}

std::array<double, 3> conv_cov(const Mat2& A, double g, double h) {
    auto [k1, k2] = impulse_kernels(A, g);
    return {integrate(k1 * k1, h), integrate(k1 * k2, h), integrate(k2 * k2, h)};
}

std::array<double, 3> conv_cov_quadrature(const Mat2& A, double g, double h,
                                          int panels) {
    // Simpson on the integrand K(s) K(s)^T
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    const double dh = h / panels;
    auto add = [&](double s, double w) {
        const Mat2 E = expm(A, s);
        const double K1 = E.a12 * g, K2 = E.a22 * g;
        acc[0] += w * K1 * K1;
        acc[1] += w * K1 * K2;
        acc[2] += w * K2 * K2;
    };
    for (int i = 0; i < panels; ++i) {
        const double s0 = i * dh;
        add(s0, dh / 6.0);
        add(s0 + 0.5 * dh, 4.0 * dh / 6.0);
        add(s0 + dh, dh / 6.0);
    }
    return acc;
}

}  // namespace awl
