#pragma once

// Self-contained Bessel machinery: spherical j_l / y_l and integer-order
// J_n / Y_n with first derivatives.  Double precision throughout; relative
// accuracy ~1e-12 over the ranges the reference pairs need
// (rho in [1e-3, 1e4] with l <= 12, z in [1e-4, 1e3] with n <= 15).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dipvol::specfun {

inline constexpr double pi = 3.14159265358979323846;
// Euler-Mascheroni constant, 20 significant digits.
inline constexpr double euler_gamma = 0.57721566490153286061;

inline constexpr int max_spherical_order = 12;
inline constexpr int max_integer_order = 15;

struct BesselEval {
    double value = 0.0;
    double derivative = 0.0;  // with respect to the argument
};

namespace detail {

// Downward (Miller) recurrence for j_l, normalized against j_0 or j_1,
// whichever is farther from a zero.  Used where upward recurrence loses
// accuracy (rho below the order).
inline void spherical_j_miller(int ell, double rho, double& jl, double& jlm1) {
    const int start = ell + 20 + static_cast<int>(rho);
    double gp = 0.0;        // g_{k+1}
    double g = 1e-30;       // g_k
    double g_l = 0.0, g_lm1 = 0.0, g_1 = 0.0, g_0 = 0.0;
    for (int k = start; k >= 1; --k) {
        double gm = (2.0 * k + 1.0) / rho * g - gp;
        gp = g;
        g = gm;
        if (std::fabs(g) > 1e250) {  // rescale to dodge overflow
            g *= 1e-250;
            gp *= 1e-250;
            g_l *= 1e-250;
            g_lm1 *= 1e-250;
            g_1 *= 1e-250;
        }
        if (k - 1 == ell) g_l = g;
        if (k - 1 == ell - 1) g_lm1 = g;
        if (k - 1 == 1) g_1 = g;
    }
    g_0 = g;
    if (ell == 0) g_l = g_0;
    if (ell == 1) g_lm1 = g_0;
    const double j0 = std::sin(rho) / rho;
    const double j1 = j0 / rho - std::cos(rho) / rho;
    const double scale = (std::fabs(j0) >= std::fabs(j1)) ? j0 / g_0 : j1 / g_1;
    jl = g_l * scale;
    jlm1 = g_lm1 * scale;
}

// Integer-order J_n by Miller downward recurrence with the standard
// normalization  J_0 + 2*sum_{k even} J_k = 1.  Also returns J_{n-1}
// (J_1 for n = 0, so the derivative formula applies everywhere).
inline void bessel_j_miller(int n, double z, double& jn, double& jnm1) {
    const int margin = 18 + static_cast<int>(13.0 * std::cbrt(z + 1.0));
    const int start = std::max(n, static_cast<int>(z)) + margin;
    double fp = 0.0;   // f_{k+1}
    double f = 1e-30;  // f_k
    double f_n = 0.0, f_nm1 = 0.0, f_1 = 0.0;
    double sum = 0.0;
    if (start == n) f_n = f;
    for (int k = start; k >= 1; --k) {
        double fm = (2.0 * k) / z * f - fp;
        fp = f;
        f = fm;
        if (std::fabs(f) > 1e250) {
            f *= 1e-250;
            fp *= 1e-250;
            f_n *= 1e-250;
            f_nm1 *= 1e-250;
            f_1 *= 1e-250;
            sum *= 1e-250;
        }
        const int ord = k - 1;
        if (ord == n) f_n = f;
        if (ord == n - 1) f_nm1 = f;
        if (ord == 1) f_1 = f;
        if (ord >= 2 && ord % 2 == 0) sum += 2.0 * f;
    }
    sum += f;  // f_0
    jn = f_n / sum;
    jnm1 = (n == 0) ? f_1 / sum : f_nm1 / sum;
}

// Ascending series for Y_0 and Y_1 (z <= 17; cancellation there costs at
// most ~3 digits, still well inside the accuracy budget).
inline void bessel_y01_series(double z, double j0, double j1, double& y0, double& y1) {
    const double q = 0.25 * z * z;
    const double lg = std::log(0.5 * z) + euler_gamma;
    // Y0
    double term = 1.0, hk = 0.0, acc0 = 0.0;
    for (int k = 1; k <= 60; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        hk += 1.0 / k;
        const double add = -term * hk;  // (-1)^{k+1} H_k q^k/(k!)^2
        acc0 += add;
        if (std::fabs(add) < 1e-18 * (std::fabs(acc0) + 1.0)) break;
    }
    y0 = (2.0 / pi) * (lg * j0 + acc0);
    // Y1
    double t1 = 0.5 * z;  // q^k z/2 / (k!(k+1)!)
    double hks = 1.0;     // H_k + H_{k+1}
    double acc1 = t1 * hks;
    for (int k = 1; k <= 60; ++k) {
        t1 *= -q / (static_cast<double>(k) * (k + 1.0));
        hks += 1.0 / k + 1.0 / (k + 1.0);
        const double add = t1 * hks;
        acc1 += add;
        if (std::fabs(add) < 1e-18 * (std::fabs(acc1) + 1.0)) break;
    }
    y1 = (2.0 / pi) * (lg * j1 - 1.0 / z) - acc1 / pi;
}

// Large-argument Hankel asymptotics for order 0 or 1 (z > 17, where the
// smallest term of the P,Q series is below ~1e-15).
inline void bessel_hankel(int n, double z, double& jn, double& yn) {
    const double mu = 4.0 * n * n;
    double P = 1.0, Q = 0.0;
    double t = 1.0;
    double prev = 1e300;
    for (int k = 1; k <= 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        t *= (mu - odd * odd) / (8.0 * z * k);
        if (std::fabs(t) >= prev) break;  // asymptotic tail turned around
        prev = std::fabs(t);
        switch (k % 4) {
            case 1: Q += t; break;
            case 2: P -= t; break;
            case 3: Q -= t; break;
            default: P += t; break;
        }
        if (std::fabs(t) < 1e-19) break;
    }
    const double chi = z - (0.5 * n + 0.25) * pi;
    const double amp = std::sqrt(2.0 / (pi * z));
    const double c = std::cos(chi), s = std::sin(chi);
    jn = amp * (P * c - Q * s);
    yn = amp * (P * s + Q * c);
}

}  // namespace detail

// j_l(rho), y_l(rho) and first derivatives.
inline std::pair<BesselEval, BesselEval> spherical_bessel(int ell, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("spherical_bessel: rho must be > 0");
    if (ell < 0 || ell > max_spherical_order)
        throw std::invalid_argument("spherical_bessel: unsupported order");

    const double s = std::sin(rho), c = std::cos(rho);
    // y_l: upward recurrence is stable (|y_l| grows with l).
    double y0 = -c / rho;
    double y1 = -c / (rho * rho) - s / rho;
    double yl = y0, ylm1 = 0.0;
    if (ell >= 1) {
        double a = y0, b = y1;
        for (int k = 1; k < ell; ++k) {
            const double nxt = (2.0 * k + 1.0) / rho * b - a;
            a = b;
            b = nxt;
        }
        yl = b;
        ylm1 = a;
    }

    double jl, jlm1;
    if (ell == 0 || rho >= ell + 2.0) {
        double j0 = s / rho;
        double j1 = j0 / rho - c / rho;
        if (ell == 0) {
            jl = j0;
            jlm1 = j1;  // placeholder, derivative handled below
        } else {
            double a = j0, b = j1;
            for (int k = 1; k < ell; ++k) {
                const double nxt = (2.0 * k + 1.0) / rho * b - a;
                a = b;
                b = nxt;
            }
            jl = b;
            jlm1 = a;
        }
    } else {
        detail::spherical_j_miller(ell, rho, jl, jlm1);
    }

    BesselEval j, y;
    j.value = jl;
    y.value = yl;
    if (ell == 0) {
        j.derivative = c / rho - s / (rho * rho);
        y.derivative = s / rho + c / (rho * rho);
    } else {
        j.derivative = jlm1 - (ell + 1.0) / rho * jl;
        y.derivative = ylm1 - (ell + 1.0) / rho * yl;
    }
    return {j, y};
}

// J_n(z), Y_n(z) and first derivatives.
inline std::pair<BesselEval, BesselEval> bessel_integer(int n, double z) {
    if (!(z > 0.0)) throw std::domain_error("bessel_integer: z must be > 0 (Y_n singular at 0)");
    if (n < 0 || n > max_integer_order)
        throw std::invalid_argument("bessel_integer: unsupported order");

    double jn, jnm1;
    detail::bessel_j_miller(n, z, jn, jnm1);

    double y0, y1;
    if (z <= 17.0) {
        double j0, j1, dummy;
        if (n == 0) {
            j0 = jn;
            j1 = jnm1;
        } else if (n == 1) {
            j0 = jnm1;
            j1 = jn;
        } else {
            detail::bessel_j_miller(0, z, j0, dummy);
            detail::bessel_j_miller(1, z, j1, dummy);
        }
        detail::bessel_y01_series(z, j0, j1, y0, y1);
    } else {
        double jd;
        detail::bessel_hankel(0, z, jd, y0);
        detail::bessel_hankel(1, z, jd, y1);
    }
    double yn = y0, ynm1 = 0.0;
    if (n == 0) {
        ynm1 = y1;  // used only through the n=0 derivative formula below
    } else {
        double a = y0, b = y1;
        for (int k = 1; k < n; ++k) {
            const double nxt = (2.0 * k) / z * b - a;
            a = b;
            b = nxt;
        }
        yn = b;
        ynm1 = a;
    }

    BesselEval J, Y;
    J.value = jn;
    Y.value = yn;
    if (n == 0) {
        J.derivative = -jnm1;  // J0' = -J1
        Y.derivative = -ynm1;
    } else {
        J.derivative = jnm1 - (static_cast<double>(n) / z) * jn;
        Y.derivative = ynm1 - (static_cast<double>(n) / z) * yn;
    }
    return {J, Y};
}

}  // namespace dipvol::specfun
