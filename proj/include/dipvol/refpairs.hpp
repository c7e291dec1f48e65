#pragma once

// Reference-function pairs (phi, psi) used by the two-potential construction
// u = A(x) * (phi(x) - psi(x) * M(x)):
//
//   BC2k  (k > 0, free waves):      phi = kx j_l(kx),  psi = -kx y_l(kx),
//                                   Wronskian -k
//   BC2   (k = 0, free threshold):  phi = x^{l+1},     psi = x^{-l},
//                                   Wronskian -(2l+1)
//   BC23  (k = 0, V_f = -c3f/x^3):  phi, psi built from Y_{2l+1}, J_{2l+1}
//                                   of argument sqrt(4 c3f / x), normalized
//                                   so phi -> x^{l+1}, psi -> x^{-l} and the
//                                   Wronskian is -(2l+1)
//
// With this sign convention psi_BC2k ~ +1/(kx) for small kx, so the k -> 0
// reduction Mbar = 3 M / k^3 maps BC2k onto BC2 for l = 1.

#include <cmath>
#include <stdexcept>

#include "dipvol/specfun.hpp"

namespace dipvol::refpairs {

enum class Bc { bc2k, bc2, bc23 };

struct RefPairSpec {
    Bc bc = Bc::bc2;
    int ell = 1;
    double k = 0.0;    // wave number, > 0 only for BC2k
    double c3f = 0.0;  // > 0 only for BC23

    static RefPairSpec bc2(int ell) { return validated({Bc::bc2, ell, 0.0, 0.0}); }
    static RefPairSpec bc2k(int ell, double k) { return validated({Bc::bc2k, ell, k, 0.0}); }
    static RefPairSpec bc23(int ell, double c3f) { return validated({Bc::bc23, ell, 0.0, c3f}); }

    static RefPairSpec validated(RefPairSpec s) {
        if (s.ell < 0) throw std::domain_error("RefPairSpec: l must be >= 0");
        switch (s.bc) {
            case Bc::bc2k:
                if (!(s.k > 0.0)) throw std::domain_error("RefPairSpec: BC2k needs k > 0");
                if (s.c3f != 0.0) throw std::domain_error("RefPairSpec: BC2k has no c3f");
                break;
            case Bc::bc2:
                if (s.k != 0.0) throw std::domain_error("RefPairSpec: BC2 requires k = 0");
                if (s.c3f != 0.0) throw std::domain_error("RefPairSpec: BC2 has no c3f");
                break;
            case Bc::bc23:
                if (s.k != 0.0) throw std::domain_error("RefPairSpec: BC23 requires k = 0");
                if (!(s.c3f > 0.0)) throw std::domain_error("RefPairSpec: BC23 needs c3f > 0");
                break;
        }
        return s;
    }
};

struct PairEval {
    double phi = 0.0, psi = 0.0;
    double dphi = 0.0, dpsi = 0.0;
};

inline double wronskian(const RefPairSpec& spec) {
    RefPairSpec::validated(spec);
    return (spec.bc == Bc::bc2k) ? -spec.k : -(2.0 * spec.ell + 1.0);
}

namespace detail {

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace detail

inline PairEval eval_pair(const RefPairSpec& spec, double x) {
    RefPairSpec::validated(spec);
    if (!(x > 0.0)) throw std::domain_error("eval_pair: x must be > 0");
    PairEval p;
    switch (spec.bc) {
        case Bc::bc2: {
            const int l = spec.ell;
            p.phi = std::pow(x, l + 1);
            p.dphi = (l + 1.0) * std::pow(x, l);
            p.psi = std::pow(x, -l);
            p.dpsi = -static_cast<double>(l) * std::pow(x, -l - 1);
            break;
        }
        case Bc::bc2k: {
            const double rho = spec.k * x;
            const auto [j, y] = specfun::spherical_bessel(spec.ell, rho);
            p.phi = rho * j.value;
            p.dphi = spec.k * (j.value + rho * j.derivative);
            p.psi = -rho * y.value;
            p.dpsi = -spec.k * (y.value + rho * y.derivative);
            break;
        }
        case Bc::bc23: {
            const int l = spec.ell;
            const int n = 2 * l + 1;
            const double s = 2.0 * std::sqrt(spec.c3f / x);  // argument of J, Y
            const auto [J, Y] = specfun::bessel_integer(n, s);
            const double sq = std::sqrt(x);
            const double cphi =
                -specfun::pi * std::pow(spec.c3f, l + 0.5) / detail::factorial(2 * l);
            const double cpsi = std::pow(spec.c3f, -l - 0.5) * detail::factorial(2 * l + 1);
            p.phi = cphi * sq * Y.value;
            p.psi = cpsi * sq * J.value;
            // d/dx [ sqrt(x) F(s) ] with ds/dx = -s/(2x)
            p.dphi = cphi / (2.0 * sq) * (Y.value - s * Y.derivative);
            p.dpsi = cpsi / (2.0 * sq) * (J.value - s * J.derivative);
            break;
        }
    }
    return p;
}

}  // namespace dipvol::refpairs
