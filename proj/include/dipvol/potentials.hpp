#pragma once

// Channel structure and potentials for odd-parity two-body collisions under
// a -1/x^6 van der Waals tail plus an anisotropic -I (cos^2 theta - 1/3)/x^3
// dipolar term.  Provides the n-channel coupling matrix, the effective
// single-channel p-wave multipole models (diabatic / adiabatic /
// non-adiabatic, from the 2x2 {l=1,3} block), and a numerical series oracle
// that re-extracts the multipole coefficients from the exact 2x2 eigenvalue.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dipvol/linalg.hpp"

namespace dipvol::potentials {

// Odd partial waves l = 1, 3, ..., 2n-1 at fixed magnetic quantum number m.
struct ChannelSet {
    int m = 0;
    int n = 1;
    std::vector<int> ells;
};

inline ChannelSet make_channels(int m, int n) {
    if (n < 1) throw std::domain_error("make_channels: need n >= 1");
    if (m < -1 || m > 1) throw std::domain_error("make_channels: |m| must be <= 1 for l_min = 1");
    ChannelSet ch;
    ch.m = m;
    ch.n = n;
    ch.ells.resize(n);
    for (int i = 0; i < n; ++i) ch.ells[i] = 2 * i + 1;
    return ch;
}

// <l m | cos^2 theta - 1/3 | l' m>.  Nonzero only for |l - l'| in {0, 2};
// closed form via cos^2 theta - 1/3 = (2/3) P_2(cos theta).
inline double anisotropy_coupling(int l, int lp, int m) {
    if (l < 0 || lp < 0) throw std::domain_error("anisotropy_coupling: l must be >= 0");
    if (std::abs(m) > std::min(l, lp))
        throw std::domain_error("anisotropy_coupling: |m| must be <= min(l, l')");
    if (l == lp) {
        const double num = l * (l + 1.0) - 3.0 * m * m;
        const double den = (2.0 * l - 1.0) * (2.0 * l + 3.0);
        return (2.0 / 3.0) * num / den;
    }
    const int lo = std::min(l, lp);
    if (std::abs(l - lp) != 2) return 0.0;
    const double m2 = static_cast<double>(m) * m;
    const double num = ((lo + 1.0) * (lo + 1.0) - m2) * ((lo + 2.0) * (lo + 2.0) - m2);
    const double den = (2.0 * lo + 1.0) * (2.0 * lo + 5.0);
    return std::sqrt(num / den) / (2.0 * lo + 3.0);
}

// W_ij(x) = delta_ij [ l_i(l_i+1)/x^2 - 1/x^6 ] - I * <cos^2-1/3>_ij / x^3,
// returned row-major n x n (symmetric).
inline linalg::Mat coupling_matrix(const ChannelSet& ch, double intensity, double x) {
    if (!(x > 0.0)) throw std::domain_error("coupling_matrix: x must be > 0");
    const int n = ch.n;
    linalg::Mat w(n, n);
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double x6 = x3 * x3;
    for (int i = 0; i < n; ++i) {
        const int li = ch.ells[i];
        w(i, i) = li * (li + 1.0) / x2 - 1.0 / x6 - intensity * anisotropy_coupling(li, li, ch.m) / x3;
        for (int j = i + 1; j < n; ++j) {
            const double v = -intensity * anisotropy_coupling(li, ch.ells[j], ch.m) / x3;
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    return w;
}

enum class MultipoleModel { diabatic, adiabatic, nonadiabatic };

inline std::string to_string(MultipoleModel m) {
    switch (m) {
        case MultipoleModel::diabatic: return "diabatic";
        case MultipoleModel::adiabatic: return "adiabatic";
        default: return "nonadiabatic";
    }
}

// Effective p-wave potential V(x) = -c2/x^2 - c3/x^3 - c4/x^4 - c5/x^5 - c6/x^6
// with c2 = -l(l+1) = -2.  The dipolar-induced coefficients are exact
// rationals from the 2x2 {l=1,3} block at intensity I.
struct Multipole {
    double c2 = -2.0;
    double c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 1.0;
    MultipoleModel model = MultipoleModel::diabatic;

    // -c3/x^3 - c4/x^4 - c5/x^5 - c6/x^6 (no rotational part)
    double eval_tail(double x) const {
        const double t = 1.0 / x;
        return -(((c6 * t + c5) * t + c4) * t + c3) * t * t * t;
    }
};

inline Multipole multipole_model(MultipoleModel model, int m, double intensity) {
    if (std::abs(m) > 1) throw std::domain_error("multipole_model: |m| must be 0 or 1");
    if (intensity < 0.0) throw std::domain_error("multipole_model: intensity must be >= 0");
    const double I = intensity;
    const double I2 = I * I, I3 = I2 * I, I4 = I2 * I2;
    Multipole v;
    v.model = model;
    if (m == 0) {
        v.c3 = 4.0 * I / 15.0;
        switch (model) {
            case MultipoleModel::diabatic:
                break;
            case MultipoleModel::adiabatic:
                v.c4 = 6.0 * I2 / 875.0;
                v.c5 = -4.0 * I3 / 65625.0;
                v.c6 = 1.0 - 86.0 * I4 / 20671875.0;
                break;
            case MultipoleModel::nonadiabatic:
                v.c4 = 33.0 * I2 / 4375.0;
                v.c5 = -4.0 * I3 / 46875.0;
                v.c6 = 1.0 - 3814.0 * I4 / 516796875.0;
                break;
        }
    } else {
        v.c3 = -2.0 * I / 15.0;
        switch (model) {
            case MultipoleModel::diabatic:
                break;
            case MultipoleModel::adiabatic:
                v.c4 = 4.0 * I2 / 875.0;
                v.c5 = 8.0 * I3 / 65625.0;
                v.c6 = 1.0 + 8.0 * I4 / 6890625.0;
                break;
            case MultipoleModel::nonadiabatic:
                v.c4 = 22.0 * I2 / 4375.0;
                v.c5 = 8.0 * I3 / 46875.0;
                v.c6 = 1.0 + 472.0 * I4 / 172265625.0;
                break;
        }
    }
    return v;
}

// Numerical oracle for the adiabatic (and non-adiabatic) multipole
// coefficients: evaluates the lowest eigenvalue of the 2x2 {l=1,3} potential
// matrix on a large-x grid -- in a cancellation-free form, with the known
// rotational and unit-vdW parts removed analytically -- and fits inverse
// powers 1/x^3..1/x^8.  Reported coefficients are c3..c6.
struct SeriesOracleResult {
    Multipole multipole;
    double fit_condition = 0.0;
};

inline SeriesOracleResult adiabatic_series_oracle(int m, double intensity,
                                                  bool include_nonadiabatic) {
    if (std::abs(m) > 1) throw std::domain_error("adiabatic_series_oracle: |m| must be 0 or 1");
    if (intensity < 0.0) throw std::domain_error("adiabatic_series_oracle: intensity must be >= 0");
    const double a11 = anisotropy_coupling(1, 1, m);
    const double a13 = anisotropy_coupling(1, 3, m);
    const double a33 = anisotropy_coupling(3, 3, m);
    const double I = intensity;

    const int npts = 240;
    const long double x_lo = 50.0L, x_hi = 5000.0L;
    const int nbasis = 10;  // 1/x^3 .. 1/x^12
    linalg::MatT<long double> A(npts, nbasis);
    std::vector<long double> rhs(npts);
    const long double Il = I;
    for (int i = 0; i < npts; ++i) {
        const long double x =
            x_lo * std::pow(x_hi / x_lo, static_cast<long double>(i) / (npts - 1));
        // residual r = lambda_min - (2/x^2 - 1/x^6), written without
        // subtracting the large diagonal pieces:
        //   r = -I a11/x^3 - V12^2 / (D/2 + sqrt((D/2)^2 + V12^2))
        // with D = V33 - V11 = 10/x^2 - I (a33 - a11)/x^3 and V12 = -I a13/x^3.
        // Evaluated in long double: extracting the tiny 1/x^6..1/x^8
        // coefficients under the dominant 1/x^3 term needs the extra digits.
        const long double x2 = x * x, x3 = x2 * x;
        const long double v12 = -Il * (long double)a13 / x3;
        const long double D = 10.0L / x2 - Il * ((long double)a33 - (long double)a11) / x3;
        long double r = -Il * (long double)a11 / x3;
        r -= v12 * v12 / (0.5L * D + std::sqrt(0.25L * D * D + v12 * v12));
        if (include_nonadiabatic) {
            // kinetic correction <Psi | d^2 Psi/dx^2> = -chi'^2 for the
            // lowest adiabatic eigenvector, chi = atan(2 V12/D)/2
            const long double v12p = 3.0L * Il * (long double)a13 / (x2 * x2);
            const long double Dp =
                -20.0L / x3 + 3.0L * Il * ((long double)a33 - (long double)a11) / (x2 * x2);
            const long double chip = (v12p * D - v12 * Dp) / (D * D + 4.0L * v12 * v12);
            r -= chip * chip;
        }
        // row normalized by x^3 keeps every sample O(c3)
        rhs[i] = r * x3;
        long double p = 1.0L;
        for (int j = 0; j < nbasis; ++j) {
            A(i, j) = -p;  // r*x^3 = sum_j (-c_{3+j}) x^{-j}, with c6 shifted below
            p /= x;
        }
    }
    auto fit = linalg::least_squares_refined(A, rhs);
    if (!(fit.condition < 1e12L))
        throw std::runtime_error("adiabatic_series_oracle: ill-conditioned series fit");
    SeriesOracleResult out;
    out.fit_condition = static_cast<double>(fit.condition);
    out.multipole.model =
        include_nonadiabatic ? MultipoleModel::nonadiabatic : MultipoleModel::adiabatic;
    out.multipole.c3 = static_cast<double>(fit.coef[0]);
    out.multipole.c4 = static_cast<double>(fit.coef[1]);
    out.multipole.c5 = static_cast<double>(fit.coef[2]);
    out.multipole.c6 = static_cast<double>(1.0L + fit.coef[3]);  // unit vdW term was removed
    return out;
}

}  // namespace dipvol::potentials
