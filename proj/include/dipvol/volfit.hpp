#pragma once

// Assembly of M(x_max) traces over a grid of starting points and their fit
// to the divergent asymptotic basis
//   BC2 (and BC23 with |m| = 1):  x^2, x, ln x, 1, ln x/x, 1/x, ln x/x^2, 1/x^2
//   BC23 with m = 0:              x, ln x, 1, 1/x, ln x/x^2, 1/x^2
// The constant term is the generalized scattering volume v_m(I, x00); the
// 1/x term eta_m obeys eta = alpha*v + beta with alpha, beta fixed by the
// asymptotic potential alone.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dipvol/ccsolve.hpp"
#include "dipvol/levy_keller.hpp"
#include "dipvol/linalg.hpp"
#include "dipvol/parallel.hpp"

namespace dipvol::volfit {

using ccsolve::SolveRequest;
using lk::BasisTag;
using refpairs::Bc;

struct TraceConfig {
    int m = 0;
    double intensity = 0.0;
    double x00 = 0.1495;
    int n_channels = 3;
    Bc bc = Bc::bc2;
    double xmax_lo = 20.0;
    double xmax_hi = 500.0;
    int points = 50;            // log-spaced
    ccsolve::GridControl grid;
    unsigned workers = 0;       // 0 = auto
    bool fast = false;          // single-pass trace instead of per-x_max solves
};

struct MTrace {
    std::vector<double> xmax;
    std::vector<double> m;
    TraceConfig config;
    bool resonant = false;      // a solve hit a (near-)singular nodal system
    double worst_condition = 0.0;
};

inline std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::domain_error("log_grid: bad range");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return g;
}

inline SolveRequest make_request(const TraceConfig& cfg, double xmax) {
    SolveRequest req;
    req.channels = potentials::make_channels(cfg.m, cfg.n_channels);
    req.intensity = cfg.intensity;
    req.nodal.x00 = cfg.x00;
    req.bc = cfg.bc;
    req.x_max = xmax;
    req.grid = cfg.grid;
    return req;
}

inline MTrace m_trace(const TraceConfig& cfg) {
    MTrace tr;
    tr.config = cfg;
    tr.xmax = log_grid(cfg.xmax_lo, cfg.xmax_hi, cfg.points);
    tr.m.assign(tr.xmax.size(), 0.0);
    if (cfg.fast) {
        auto fast = ccsolve::fast_trace(make_request(cfg, cfg.xmax_hi), tr.xmax);
        for (std::size_t i = 0; i < fast.size(); ++i) tr.m[i] = fast[i].second;
        return tr;
    }
    std::vector<double> cond(tr.xmax.size(), 0.0);
    std::vector<char> pole(tr.xmax.size(), 0);
    par::parallel_for(
        tr.xmax.size(),
        [&](std::size_t i) {
            auto sol = ccsolve::threshold_solution(make_request(cfg, tr.xmax[i]));
            tr.m[i] = sol.m_at_xmax;
            cond[i] = sol.condition;
            pole[i] = sol.near_pole ? 1 : 0;
        },
        cfg.workers);
    for (std::size_t i = 0; i < tr.xmax.size(); ++i) {
        tr.worst_condition = std::max(tr.worst_condition, cond[i]);
        if (pole[i]) tr.resonant = true;
    }
    return tr;
}

inline std::vector<BasisTag> fit_basis(Bc bc, int m) {
    if (bc == Bc::bc23 && m == 0)
        return {BasisTag::x1,    BasisTag::log_x,         BasisTag::one,
                BasisTag::inv_x, BasisTag::log_x_over_x2, BasisTag::inv_x2};
    return {BasisTag::x2,           BasisTag::x1,    BasisTag::log_x,
            BasisTag::one,          BasisTag::log_x_over_x, BasisTag::inv_x,
            BasisTag::log_x_over_x2, BasisTag::inv_x2};
}

struct FitResult {
    std::vector<BasisTag> basis;
    std::vector<double> coefficients;
    double volume = 0.0;        // constant term v_m
    double eta = 0.0;           // 1/x term
    double residual_rms = 0.0;  // relative to the data rms
    double condition = 0.0;
    bool accepted = false;      // residual below the acceptance threshold

    double coef(BasisTag t) const {
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (basis[i] == t) return coefficients[i];
        return 0.0;
    }
};

inline constexpr double default_residual_threshold = 1e-5;

inline FitResult fit_expansion(const MTrace& tr,
                               double residual_threshold = default_residual_threshold) {
    if (tr.resonant)
        throw std::runtime_error("fit_expansion: trace is flagged resonant; fit refused");
    const auto basis = fit_basis(tr.config.bc, tr.config.m);
    if (tr.xmax.size() < 3 * basis.size())
        throw std::domain_error("fit_expansion: need at least 3x more samples than basis terms");
    // long double least squares: with trace values up to ~1e5 and the
    // near-collinear log-family columns, the double solve floor
    // cond*eps*||y|| would already mask the small coefficients
    linalg::MatT<long double> A(tr.xmax.size(), basis.size());
    std::vector<long double> y(tr.m.begin(), tr.m.end());
    for (std::size_t i = 0; i < tr.xmax.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            A(i, j) = lk::basis_eval(basis[j], tr.xmax[i]);
    auto ls = linalg::least_squares_refined(A, y);
    if (!(ls.condition < 1e12L))
        throw std::runtime_error(
            "fit_expansion: ill-conditioned design matrix; widen the x_max grid");
    FitResult out;
    out.basis = basis;
    out.coefficients.assign(ls.coef.begin(), ls.coef.end());
    out.residual_rms = static_cast<double>(ls.residual_rms);
    out.condition = static_cast<double>(ls.condition);
    out.volume = out.coef(BasisTag::one);
    out.eta = out.coef(BasisTag::inv_x);
    out.accepted = out.residual_rms <= residual_threshold;
    return out;
}

struct VolumeResult {
    double volume = 0.0;             // v_m(I, x00) in the requested bc
    double volume_bc2_equiv = 0.0;   // BC23 value mapped onto the BC2 constant
    bool pole = false;               // resonant trace: no finite volume
    int pole_side = 0;               // sign of M0 just off the divergence, if known
    FitResult fit;
};

// Fit the trace and report the generalized scattering volume.  For BC23 the
// BC2-equivalent constant (shifted by the analytic pair offset, evaluated
// with the adiabatic p-wave multipole) is reported alongside.
inline VolumeResult extract_volume(const TraceConfig& cfg) {
    VolumeResult out;
    MTrace tr = m_trace(cfg);
    if (tr.resonant) {
        out.pole = true;
        // sign information from the largest finite samples
        double big = 0.0;
        for (double v : tr.m)
            if (std::isfinite(v) && std::fabs(v) > std::fabs(big)) big = v;
        out.pole_side = (big > 0.0) ? 1 : (big < 0.0 ? -1 : 0);
        return out;
    }
    out.fit = fit_expansion(tr);
    out.volume = out.fit.volume;
    out.volume_bc2_equiv = out.volume;
    if (cfg.bc == Bc::bc23) {
        const auto vad =
            potentials::multipole_model(potentials::MultipoleModel::adiabatic, cfg.m, cfg.intensity);
        const double c3f = std::fabs(ccsolve::p_wave_c3(cfg.m, cfg.intensity));
        if (c3f > 0.0) out.volume_bc2_equiv = out.volume - lk::delta_m0(vad.c3, vad.c4, c3f);
    }
    return out;
}

struct LinearRelation {
    double alpha = 0.0, beta = 0.0, r2 = 0.0;
};

// eta = alpha * v + beta across a set of nodal parameters.
inline LinearRelation linear_relation(const std::vector<double>& v,
                                      const std::vector<double>& eta) {
    if (v.size() != eta.size() || v.size() < 10)
        throw std::domain_error("linear_relation: need >= 10 paired samples");
    auto lf = linalg::fit_line(v, eta);
    return {lf.slope, lf.intercept, lf.r2};
}

}  // namespace dipvol::volfit
