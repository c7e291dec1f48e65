#pragma once

// Closed-form threshold expansions and ODE forms of the two-potential
// construction u = A(x) (phi - psi M) for the p-wave multipole potential
// V = -c3/x^3 - c4/x^4 - c5/x^5 - c6/x^6:
//
//   * asymptotic expansions of M(x), A(x) and u(x) for the BC2 and BC23
//     reference pairs (M through 1/x, A through 1/x^3, u through 1/x^2),
//   * the constant offset M0_BC23 - M0_BC2 fixed by pair-independence of u,
//   * the exact first-order ODEs dM/dx = -(V-V_f)/W (phi - psi M)^2 and
//     d lnA/dx = -(V-V_f)/W psi (phi - psi M) as numerical oracles, with
//     pole traversal in the reciprocal variable 1/M,
//   * the low-energy p-wave phase formula and the dipolar perturbation
//     integrals it is assembled from.
//
// The 1/x coefficient of the BC23 expansion below is a re-derivation by
// order-matching the Riccati equation against the exact reference-pair
// series (the Y-Bessel log structure contributes the Euler-gamma and
// ln(c3f) pieces); it reduces to the BC2 coefficient as c3f -> 0 and is
// cross-checked at runtime by the Riccati oracle tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dipvol/ode.hpp"
#include "dipvol/potentials.hpp"
#include "dipvol/refpairs.hpp"
#include "dipvol/specfun.hpp"

namespace dipvol::lk {

using potentials::Multipole;
using refpairs::Bc;
using refpairs::RefPairSpec;

enum class BasisTag {
    x2,            // x^2
    x1,            // x
    log_x,         // ln x
    one,           // 1
    log_x_over_x,  // ln x / x
    inv_x,         // 1/x
    log_x_over_x2, // ln x / x^2
    inv_x2,        // 1/x^2
    inv_x3,        // 1/x^3
};

inline double basis_eval(BasisTag tag, double x) {
    switch (tag) {
        case BasisTag::x2: return x * x;
        case BasisTag::x1: return x;
        case BasisTag::log_x: return std::log(x);
        case BasisTag::one: return 1.0;
        case BasisTag::log_x_over_x: return std::log(x) / x;
        case BasisTag::inv_x: return 1.0 / x;
        case BasisTag::log_x_over_x2: return std::log(x) / (x * x);
        case BasisTag::inv_x2: return 1.0 / (x * x);
        default: return 1.0 / (x * x * x);
    }
}

inline const char* basis_name(BasisTag tag) {
    switch (tag) {
        case BasisTag::x2: return "x^2";
        case BasisTag::x1: return "x";
        case BasisTag::log_x: return "ln(x)";
        case BasisTag::one: return "1";
        case BasisTag::log_x_over_x: return "ln(x)/x";
        case BasisTag::inv_x: return "1/x";
        case BasisTag::log_x_over_x2: return "ln(x)/x^2";
        case BasisTag::inv_x2: return "1/x^2";
        default: return "1/x^3";
    }
}

struct AsymptoticExpansion {
    struct Term {
        BasisTag tag;
        double coef;
    };
    std::vector<Term> terms;

    double coef(BasisTag tag) const {
        for (const auto& t : terms)
            if (t.tag == tag) return t.coef;
        return 0.0;
    }
    double eval(double x) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.coef * basis_eval(t.tag, x);
        return s;
    }
};

// M0_BC23 - M0_BC2 for given multipole c3, c4 and reference c3f.
inline double delta_m0(double c3, double c4, double c3f) {
    if (!(c3f > 0.0)) throw std::domain_error("delta_m0: c3f must be > 0");
    const double g = specfun::euler_gamma;
    return -(2.0 / 9.0) * c3f * c4 - (11.0 / 144.0) * c3 * c3 * c3f -
           (1.0 / 24.0) * c3 * c3f * c3f +
           (83.0 / 432.0 - g / 6.0 - std::log(c3f) / 12.0) * c3f * c3f * c3f;
}

// Expansion of M(x) = -.. x^2 - .. x - .. ln x + M0 + .. ln x/x + .. /x.
inline AsymptoticExpansion m_expansion(const Multipole& v, Bc bc, double c3f, double m0) {
    const double c3 = v.c3, c4 = v.c4, c5 = v.c5, c6 = v.c6;
    AsymptoticExpansion e;
    if (bc == Bc::bc2) {
        e.terms = {
            {BasisTag::x2, -c3 / 6.0},
            {BasisTag::x1, -(c3 * c3 / 9.0 + c4 / 3.0)},
            {BasisTag::log_x, -(c3 * c3 * c3 / 12.0 + c3 * c4 / 3.0 + c5 / 3.0)},
            {BasisTag::one, m0},
            {BasisTag::log_x_over_x,
             std::pow(c3, 4) / 18.0 + 2.0 * c3 * c3 * c4 / 9.0 + 2.0 * c3 * c5 / 9.0},
            {BasisTag::inv_x, 11.0 * std::pow(c3, 4) / 162.0 + 37.0 * c3 * c3 * c4 / 108.0 +
                                  2.0 * c4 * c4 / 9.0 + c3 * c5 / 3.0 + c6 / 3.0 -
                                  2.0 * c3 * m0 / 3.0},
        };
        return e;
    }
    if (bc != Bc::bc23) throw std::domain_error("m_expansion: bc must be BC2 or BC23");
    if (!(c3f > 0.0)) throw std::domain_error("m_expansion: BC23 needs c3f > 0");
    const double d = c3 - c3f;
    const double g = specfun::euler_gamma;
    const double inv_x_coef =
        (11.0 / 162.0) * std::pow(d, 4) + (47.0 / 216.0) * d * d * d * c3f +
        (43.0 / 180.0) * d * d * c3f * c3f + (13.0 / 54.0) * d * std::pow(c3f, 3) +
        (37.0 / 108.0) * d * d * c4 + (19.0 / 36.0) * d * c3f * c4 +
        (1.0 / 4.0) * c3f * c3f * c4 + (2.0 / 9.0) * c4 * c4 + c3 * c5 / 3.0 + c6 / 3.0 -
        (g / 9.0) * d * std::pow(c3f, 3) - (std::log(c3f) / 18.0) * d * std::pow(c3f, 3) -
        (2.0 / 3.0) * d * m0;
    e.terms = {
        {BasisTag::x2, -d / 6.0},
        {BasisTag::x1, -(d * d / 9.0 + d * c3f / 3.0 + c4 / 3.0)},
        {BasisTag::log_x,
         -((c3 * c3 * c3 - c3f * c3f * c3f) / 12.0 + c3 * c4 / 3.0 + c5 / 3.0)},
        {BasisTag::one, m0},
        {BasisTag::log_x_over_x, d * (c3 * c3 * c3 / 18.0 + 2.0 * c3 * c4 / 9.0 + 2.0 * c5 / 9.0)},
        {BasisTag::inv_x, inv_x_coef},
    };
    return e;
}

// Expansion of the global amplitude A(x) = 1 + ../x + ../x^2 + ../x^3.
inline AsymptoticExpansion a_expansion(const Multipole& v, Bc bc, double c3f) {
    const double c3 = v.c3, c4 = v.c4, c5 = v.c5;
    AsymptoticExpansion e;
    if (bc == Bc::bc2) {
        e.terms = {
            {BasisTag::one, 1.0},
            {BasisTag::inv_x, c3 / 3.0},
            {BasisTag::inv_x2, c3 * c3 / 12.0 + c4 / 6.0},
            {BasisTag::inv_x3, c3 * c3 * c3 / 36.0 + c3 * c4 / 9.0 + c5 / 9.0},
        };
        return e;
    }
    if (bc != Bc::bc23) throw std::domain_error("a_expansion: bc must be BC2 or BC23");
    if (!(c3f > 0.0)) throw std::domain_error("a_expansion: BC23 needs c3f > 0");
    const double d = c3 - c3f;
    e.terms = {
        {BasisTag::one, 1.0},
        {BasisTag::inv_x, d / 3.0},
        {BasisTag::inv_x2, d * d / 12.0 + c3f * d / 24.0 + c4 / 6.0},
        {BasisTag::inv_x3, d * d * d / 36.0 + d * d * c3f / 24.0 + d * c3f * c3f / 60.0 +
                               c4 * d / 9.0 + c4 * c3f / 36.0 + c5 / 9.0},
    };
    return e;
}

// Threshold wave function u(x) = x^2 + .. x + .. + .. ln x/x + ../x
// + .. ln x/x^2 + ../x^2; independent of the reference pair when the M0
// values of BC2 and BC23 differ by delta_m0.
inline AsymptoticExpansion u_expansion(const Multipole& v, Bc bc, double c3f, double m0) {
    const double c3 = v.c3, c4 = v.c4, c5 = v.c5, c6 = v.c6;
    double shift = 0.0;  // the BC23 1/x coefficient carries -M0 - shift-like pieces
    if (bc == Bc::bc23) {
        if (!(c3f > 0.0)) throw std::domain_error("u_expansion: BC23 needs c3f > 0");
        const double g = specfun::euler_gamma;
        shift = -(2.0 * c4 / 9.0 + 11.0 * c3 * c3 / 144.0) * c3f - c3 * c3f * c3f / 24.0 +
                (83.0 / 432.0 - g / 6.0 - std::log(c3f) / 12.0) * std::pow(c3f, 3);
    } else if (bc != Bc::bc2) {
        throw std::domain_error("u_expansion: bc must be BC2 or BC23");
    }
    const double m0_block = -m0 + shift;  // appears in the 1/x and 1/x^2 terms
    AsymptoticExpansion e;
    e.terms = {
        {BasisTag::x2, 1.0},
        {BasisTag::x1, c3 / 2.0},
        {BasisTag::one, c3 * c3 / 4.0 + c4 / 2.0},
        {BasisTag::log_x_over_x, c3 * c3 * c3 / 12.0 + c3 * c4 / 3.0 + c5 / 3.0},
        {BasisTag::inv_x, 17.0 * c3 * c3 * c3 / 216.0 + c3 * c4 / 4.0 + c5 / 9.0 + m0_block},
        {BasisTag::log_x_over_x2,
         -(std::pow(c3, 4) / 48.0 + c3 * c3 * c4 / 12.0 + c3 * c5 / 12.0)},
        {BasisTag::inv_x2,
         -(79.0 * std::pow(c3, 4) / 1728.0 + 11.0 * c3 * c3 * c4 / 48.0 + c4 * c4 / 8.0 +
           c6 / 4.0 + 37.0 * c3 * c5 / 144.0 + (c3 / 4.0) * m0_block)},
    };
    return e;
}

// ---------------------------------------------------------------------------
// ODE oracles
// ---------------------------------------------------------------------------

struct PoleEvent {
    double x_lo = 0.0, x_hi = 0.0;  // bracket of the crossing through +-inf
};

struct RiccatiResult {
    std::vector<std::pair<double, double>> samples;  // (x, M(x)) at the grid points
    std::vector<PoleEvent> poles;
};

namespace detail {

inline double vf_tail(const RefPairSpec& spec, double x) {
    return (spec.bc == Bc::bc23) ? -spec.c3f / (x * x * x) : 0.0;
}

// |phi/psi| sets the scale beyond which M is traversing a pole; add a floor
// so the switch logic stays sane where phi or psi vanish.
inline double pole_scale(const RefPairSpec& spec, double x) {
    const auto p = refpairs::eval_pair(spec, x);
    const double r = std::fabs(p.phi) / (std::fabs(p.psi) + 1e-300);
    return 10.0 * std::max(1.0, r);
}

}  // namespace detail

// Integrate dM/dx = -(V - V_f)/W (phi - psi M)^2 from (anchor_x, anchor_m),
// sampling M at every grid point.  The grid must be sorted ascending and
// contain anchor_x inside its range (or at an end).  A divergence of M is
// traversed by switching to the reciprocal variable 1/M; each crossing is
// reported as a pole event with a bracketing interval.
inline RiccatiResult riccati_integrate(const Multipole& v, const RefPairSpec& spec,
                                       double anchor_x, double anchor_m,
                                       const std::vector<double>& x_grid,
                                       double rtol = 1e-11) {
    RefPairSpec::validated(spec);
    if (x_grid.empty()) throw std::invalid_argument("riccati_integrate: empty grid");
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (!(x_grid[i] > x_grid[i - 1]))
            throw std::invalid_argument("riccati_integrate: grid must ascend");
    if (anchor_x < x_grid.front() - 1e-12 || anchor_x > x_grid.back() + 1e-12)
        throw std::invalid_argument("riccati_integrate: anchor outside grid range");

    const double w = wronskian(spec);
    RiccatiResult out;
    out.samples.resize(x_grid.size());

    // g(x) = (V - V_f)/W; direct mode: M' = -g (phi - psi M)^2,
    // reciprocal mode: (1/M)' = g (phi/M - psi)^2 in the variable mu = 1/M.
    auto rhs_direct = [&](double x, const std::vector<double>& y, std::vector<double>& dy) {
        const auto p = refpairs::eval_pair(spec, x);
        const double g = (v.eval_tail(x) - detail::vf_tail(spec, x)) / w;
        const double q = p.phi - p.psi * y[0];
        dy[0] = -g * q * q;
    };
    auto rhs_recip = [&](double x, const std::vector<double>& y, std::vector<double>& dy) {
        const auto p = refpairs::eval_pair(spec, x);
        const double g = (v.eval_tail(x) - detail::vf_tail(spec, x)) / w;
        const double q = p.phi * y[0] - p.psi;
        dy[0] = g * q * q;
    };

    bool recip = std::fabs(anchor_m) > detail::pole_scale(spec, anchor_x);
    std::vector<double> y{recip ? 1.0 / anchor_m : anchor_m};

    auto run_segment = [&](double x_from, double x_to) {
        double x = x_from;
        ode::Options opt;
        opt.rtol = rtol;
        opt.atol = 1e-300;
        while (true) {
            bool switch_request = false;
            double prev_x = x, prev_v = y[0];
            auto on_accept = [&](double xa, const std::vector<double>& ya) {
                if (!recip) {
                    if (std::fabs(ya[0]) > detail::pole_scale(spec, xa)) {
                        switch_request = true;
                        return false;
                    }
                } else {
                    if (prev_v != 0.0 && ya[0] * prev_v < 0.0)
                        out.poles.push_back({std::min(prev_x, xa), std::max(prev_x, xa)});
                    if (std::fabs(ya[0]) > 2.0 / detail::pole_scale(spec, xa)) {
                        switch_request = true;
                        return false;
                    }
                }
                prev_x = xa;
                prev_v = ya[0];
                return true;
            };
            // weight keeps the control relative but bounded away from the
            // zero crossing of mu
            auto weight = [&](const std::vector<double>& yy, std::vector<double>& ww) {
                ww[0] = std::fabs(yy[0]) + 1e-6;
            };
            if (!recip)
                ode::integrate(rhs_direct, x, y, x_to, opt, weight, nullptr, on_accept);
            else
                ode::integrate(rhs_recip, x, y, x_to, opt, weight, nullptr, on_accept);
            if (!switch_request) break;
            y[0] = 1.0 / y[0];
            recip = !recip;
        }
    };

    // march from the anchor to the right, then from the anchor to the left
    const auto first_right =
        std::lower_bound(x_grid.begin(), x_grid.end(), anchor_x) - x_grid.begin();
    {
        bool recip0 = recip;
        std::vector<double> y0 = y;
        double xcur = anchor_x;
        for (std::size_t i = first_right; i < x_grid.size(); ++i) {
            run_segment(xcur, x_grid[i]);
            xcur = x_grid[i];
            out.samples[i] = {xcur, recip ? 1.0 / y[0] : y[0]};
        }
        recip = recip0;
        y = y0;
    }
    {
        double xcur = anchor_x;
        for (std::size_t ii = first_right; ii-- > 0;) {
            run_segment(xcur, x_grid[ii]);
            xcur = x_grid[ii];
            out.samples[ii] = {xcur, recip ? 1.0 / y[0] : y[0]};
        }
    }
    return out;
}

struct AmplitudeResult {
    std::vector<std::pair<double, double>> samples;  // (x, A(x))
};

// Integrate d ln A/dx = -(V - V_f)/W psi (phi - psi M) jointly with M,
// anchoring M at (anchor_x, anchor_m) and normalizing A at the top grid
// point with the analytic tail so that A -> 1 at infinity.  The requested
// span must contain no pole of M (an M divergence is a zero of A, where
// ln A leaves any floating-point range).
inline AmplitudeResult amplitude_integrate(const Multipole& v, const RefPairSpec& spec,
                                           double anchor_x, double anchor_m,
                                           const std::vector<double>& x_grid,
                                           double rtol = 1e-11) {
    RefPairSpec::validated(spec);
    if (x_grid.size() < 2) throw std::invalid_argument("amplitude_integrate: need >= 2 grid points");
    const double x_top = x_grid.back();
    const double w = wronskian(spec);

    // bring M to the top grid point first
    double m_top = anchor_m;
    if (std::fabs(anchor_x - x_top) > 1e-12 * std::max(1.0, x_top)) {
        std::vector<double> grid2{std::min(anchor_x, x_top), std::max(anchor_x, x_top)};
        auto rr = riccati_integrate(v, spec, anchor_x, anchor_m, grid2, rtol);
        if (!rr.poles.empty())
            throw std::runtime_error("amplitude_integrate: pole of M inside the span");
        m_top = (anchor_x < x_top) ? rr.samples.back().second : rr.samples.front().second;
    }

    const auto tail = a_expansion(v, spec.bc, spec.c3f);
    std::vector<double> y{m_top, std::log(tail.eval(x_top))};
    auto rhs = [&](double x, const std::vector<double>& yy, std::vector<double>& dy) {
        const auto p = refpairs::eval_pair(spec, x);
        const double g = (v.eval_tail(x) - detail::vf_tail(spec, x)) / w;
        const double q = p.phi - p.psi * yy[0];
        dy[0] = -g * q * q;
        dy[1] = -g * p.psi * q;
    };

    AmplitudeResult out;
    out.samples.resize(x_grid.size());
    out.samples.back() = {x_top, std::exp(y[1])};
    double xcur = x_top;
    ode::Options opt;
    opt.rtol = rtol;
    opt.atol = 1e-300;
    auto weight = [&](const std::vector<double>& yy, std::vector<double>& ww) {
        ww[0] = std::fabs(yy[0]) + 1e-6;
        ww[1] = std::fabs(yy[1]) + 1.0;
    };
    for (std::size_t ii = x_grid.size() - 1; ii-- > 0;) {
        try {
            ode::integrate(rhs, xcur, y, x_grid[ii], opt, weight);
        } catch (const ode::StepUnderflow&) {
            // ln A -> -inf when M diverges: report the pole instead
            throw std::runtime_error("amplitude_integrate: pole of M inside the span");
        }
        if (!std::isfinite(y[0]) || std::fabs(y[0]) > 1e280)
            throw std::runtime_error("amplitude_integrate: pole of M inside the span");
        out.samples[ii] = {x_grid[ii], std::exp(y[1])};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Low-energy phase
// ---------------------------------------------------------------------------

struct PhaseParams {
    double d = 0.0;   // matching radius
    double t0 = 0.0;  // tangent of the short-range phase at d
    double k = 0.0;   // wave number
};

struct PhaseResult {
    double tan_delta = 0.0;
    bool regime_warning = false;  // set when k*d is not small
};

// tan(delta_1) to first order in the dipolar tail beyond x = d, through the
// t0^2 terms.
inline PhaseResult low_energy_phase(double c3, const PhaseParams& p) {
    if (!(p.d > 0.0) || !(p.k > 0.0)) throw std::domain_error("low_energy_phase: need d, k > 0");
    const double k = p.k, d = p.d, t0 = p.t0;
    const double k2 = k * k, k3 = k2 * k, d2 = d * d;
    PhaseResult out;
    out.regime_warning = (k * d > 0.3);
    out.tan_delta = c3 * (k / 4.0 - d2 * k3 / 18.0) +
                    t0 * (1.0 + 2.0 * c3 / (3.0 * d) - 4.0 * c3 * d * k2 / 15.0) +
                    t0 * t0 * c3 *
                        (1.0 / (4.0 * d2 * d2 * k3) + 1.0 / (2.0 * d2 * k) - k / 4.0 +
                         d2 * k3 / 18.0);
    return out;
}

struct PerturbationIntegrals {
    // k * integral_{kd}^{upper} Phi Psi / rho^3 drho for the free-wave pair
    // (the c3 prefactor of the potential is factored out)
    double phiphi = 0.0, phipsi = 0.0, psipsi = 0.0;
};

namespace detail {

// 32-point Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration.
inline const std::vector<std::pair<double, double>>& gl32() {
    static const std::vector<std::pair<double, double>> table = [] {
        constexpr int n = 32;
        std::vector<std::pair<double, double>> t(n);
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(specfun::pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / pp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            const double wgt = 2.0 / ((1.0 - x * x) * pp * pp);
            t[i] = {-x, wgt};
            t[n - 1 - i] = {x, wgt};
        }
        return t;
    }();
    return table;
}

template <class F>
double gl_segment(F&& f, double a, double b) {
    double s = 0.0;
    for (const auto& [xi, wi] : gl32()) {
        const double r = 0.5 * (a + b) + 0.5 * (b - a) * xi;
        s += wi * f(r);
    }
    return 0.5 * (b - a) * s;
}

// integral of f over [a, infinity) for integrands that decay like an
// oscillation of period pi times an inverse power: geometric panels up to
// the oscillatory region, then pi-length segments with polynomial
// extrapolation of the partial sums in 1/X.
template <class F>
double oscillatory_tail_integral(F&& f, double a, double upper) {
    double total = 0.0;
    double x0 = std::min(std::max(8.0, a), std::isfinite(upper) ? upper : 8.0);
    // smooth inner part on geometric panels
    double lo = a;
    while (lo < x0) {
        const double hi = std::min(lo * 2.0, x0);
        total += gl_segment(f, lo, hi);
        lo = hi;
    }
    if (std::isfinite(upper)) {
        double xx = x0;
        while (xx < upper) {
            const double hi = std::min(xx + specfun::pi, upper);
            total += gl_segment(f, xx, hi);
            xx = hi;
        }
        return total;
    }
    constexpr int nseg = 48;
    std::vector<double> X(nseg + 1), T(nseg + 1);
    X[0] = x0;
    T[0] = total;
    for (int j = 1; j <= nseg; ++j) {
        X[j] = X[j - 1] + specfun::pi;
        T[j] = T[j - 1] + gl_segment(f, X[j - 1], X[j]);
    }
    // Neville extrapolation of T(1/X -> 0) on the last few partial sums
    constexpr int npts = 6;
    double u[npts], val[npts];
    for (int i = 0; i < npts; ++i) {
        u[i] = 1.0 / X[nseg - npts + 1 + i];
        val[i] = T[nseg - npts + 1 + i];
    }
    for (int level = 1; level < npts; ++level)
        for (int i = 0; i < npts - level; ++i)
            val[i] = (u[i + level] * val[i] - u[i] * val[i + 1]) / (u[i + level] - u[i]);
    return val[0];
}

}  // namespace detail

// The three dipolar perturbation integrals over the free-wave pair of
// angular momentum ell, lower limit rho = k*d.  upper_rho < inf truncates
// the integral (used to probe the convergence rate of the tail).
inline PerturbationIntegrals perturbation_integrals(
    double d, double k, int ell = 1,
    double upper_rho = std::numeric_limits<double>::infinity()) {
    if (!(d > 0.0) || !(k > 0.0)) throw std::domain_error("perturbation_integrals: need d, k > 0");
    const auto pair_at = [&](double rho) { return refpairs::eval_pair(RefPairSpec::bc2k(ell, 1.0), rho); };
    const double lower = k * d;
    PerturbationIntegrals out;
    out.phiphi = k * detail::oscillatory_tail_integral(
                         [&](double r) {
                             const auto p = pair_at(r);
                             return p.phi * p.phi / (r * r * r);
                         },
                         lower, upper_rho);
    out.phipsi = k * detail::oscillatory_tail_integral(
                         [&](double r) {
                             const auto p = pair_at(r);
                             return p.phi * p.psi / (r * r * r);
                         },
                         lower, upper_rho);
    out.psipsi = k * detail::oscillatory_tail_integral(
                         [&](double r) {
                             const auto p = pair_at(r);
                             return p.psi * p.psi / (r * r * r);
                         },
                         lower, upper_rho);
    return out;
}

}  // namespace dipvol::lk
