#pragma once

// Field-free scattering parameters of the -1/x^6 tail with a nodal-line
// boundary condition, and parameter scans of the generalized p-wave
// scattering volume: M0 versus the nodal parameter x00, divergence
// (threshold bound state) detection, and channel-count labeling of the
// resonances.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dipvol/ode.hpp"
#include "dipvol/parallel.hpp"
#include "dipvol/volfit.hpp"

namespace dipvol::scan {

// ---------------------------------------------------------------------------
// field-free single-channel parameters
// ---------------------------------------------------------------------------

inline double double_factorial(int n) {  // (-1)!! = 1
    double f = 1.0;
    for (int k = n; k >= 2; k -= 2) f *= k;
    return f;
}

struct ScatteringParams {
    int ell = 0;
    double a_param = 0.0;  // -B/A of u -> A x^{l+1} + B x^{-l}, i.e. a^(2l+1)
    double value = 0.0;    // a_param / ((2l+1)!!(2l-1)!!); for l=1 this is (a1)^3/3
    double a = 0.0;        // signed (a_param)^(1/(2l+1))
    double A = 0.0, B = 0.0;
    double match_x = 0.0;
    bool tail_limited = false;  // l >= 2: -B/A keeps a residual tail dependence
};

namespace detail {

// Integrate u'' = (l(l+1)/x^2 - 1/x^6) u outward from a node at x00.
inline void integrate_free(int ell, double x00, double x_to, double& u, double& up,
                           double rtol = 1e-12) {
    const double lfac = ell * (ell + 1.0);
    auto rhs = [&](double x, const std::vector<double>& y, std::vector<double>& dy) {
        const double x2 = x * x;
        const double inv_x6 = 1.0 / (x2 * x2 * x2);
        dy[0] = y[1];
        dy[1] = (lfac / x2 - inv_x6) * y[0];
    };
    auto max_step = [&](double x) {
        const double x2 = x * x;
        const double w = std::fabs(lfac / x2 - 1.0 / (x2 * x2 * x2));
        return 2.0 * specfun::pi / (40.0 * (std::sqrt(w) + 1.0 / x));
    };
    auto weight = [&](const std::vector<double>& y, std::vector<double>& w) {
        const double s = std::max({std::fabs(y[0]), std::fabs(y[1]), 1e-30});
        w[0] = s;
        w[1] = s;
    };
    std::vector<double> y{0.0, 1.0};
    double x = x00;
    ode::Options opt;
    opt.rtol = rtol;
    ode::integrate(rhs, x, y, x_to, opt, weight, max_step);
    u = y[0];
    up = y[1];
}

// Local relative amplitude (phi' u - phi u') / (psi' u - psi u') for the
// free power-law pair at x.
inline double m_local_bc2(int ell, double x, double u, double up) {
    const auto p = refpairs::eval_pair(refpairs::RefPairSpec::bc2(ell), x);
    return (p.dphi * u - p.phi * up) / (p.dpsi * u - p.psi * up);
}

// Remove the known vdW tail of the local amplitude: for l = 0 and l = 1 the
// constant term follows from M_local to O(x^-7).
inline double tail_corrected_constant(int ell, double x, double m_local) {
    if (ell == 0) {
        // M = a + 1/(3x^3) - a/(2x^4) + a^2/(5x^5) + ...
        double a = m_local;
        for (int it = 0; it < 4; ++it)
            a = m_local - 1.0 / (3.0 * x * x * x) + a / (2.0 * x * x * x * x) -
                a * a / (5.0 * std::pow(x, 5));
        return a;
    }
    if (ell == 1) {
        // M = M0 + 1/(3x) - M0/(6x^4) - 2/(45 x^5) + ...
        const double x4 = std::pow(x, 4);
        return (m_local - 1.0 / (3.0 * x) + 2.0 / (45.0 * x4 * x)) / (1.0 - 1.0 / (6.0 * x4));
    }
    return m_local;  // no closed tail correction carried for l >= 2
}

}  // namespace detail

// Threshold scattering parameter of the truncated-vdW model: node at x00,
// outward integration, match onto A x^{l+1} + B x^{-l}.  The matching point
// extends itself until the extracted parameter is stable.
inline ScatteringParams field_free_params(int ell, double x00, double rtol = 1e-12) {
    if (!(x00 > 0.05) || !(x00 < 1.0))
        throw std::domain_error("field_free_params: x00 outside the inner-wall regime");
    if (ell != 0 && ell % 2 == 0)
        throw std::domain_error("field_free_params: l must be 0 or odd");
    ScatteringParams out;
    out.ell = ell;
    out.tail_limited = (ell >= 2);

    double x_m = (ell <= 1) ? 30.0 : 12.0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double u = 0.0, up = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        detail::integrate_free(ell, x00, x_m, u, up, rtol);
        const double m_loc = detail::m_local_bc2(ell, x_m, u, up);
        const double cur = detail::tail_corrected_constant(ell, x_m, m_loc);
        if (std::isfinite(prev) && std::fabs(cur - prev) <= 1e-9 * std::max(1.0, std::fabs(cur))) {
            out.a_param = cur;
            break;
        }
        prev = cur;
        out.a_param = cur;
        x_m *= (ell <= 1) ? 1.6 : 1.3;
    }
    // growing/decaying split at the final matching point
    {
        const auto p = refpairs::eval_pair(refpairs::RefPairSpec::bc2(ell), x_m);
        const double w = refpairs::wronskian(refpairs::RefPairSpec::bc2(ell));
        out.A = (u * p.dpsi - up * p.psi) / w;
        out.B = -(u * p.dphi - up * p.phi) / w;
        out.match_x = x_m;
    }
    const double norm = double_factorial(2 * ell + 1) * double_factorial(2 * ell - 1);
    out.value = out.a_param / norm;
    out.a = (out.a_param >= 0.0) ? std::pow(out.a_param, 1.0 / (2 * ell + 1))
                                 : -std::pow(-out.a_param, 1.0 / (2 * ell + 1));
    return out;
}

// Coefficient of the growing solution x^{l+1}; its zeros are the threshold
// bound states (divergences of the scattering parameter).
inline double growing_coefficient(int ell, double x00, double x_m = 1000.0) {
    double u = 0.0, up = 0.0;
    detail::integrate_free(ell, x00, x_m, u, up);
    const auto p = refpairs::eval_pair(refpairs::RefPairSpec::bc2(ell), x_m);
    const double w = refpairs::wronskian(refpairs::RefPairSpec::bc2(ell));
    return (u * p.dpsi - up * p.psi) / w;
}

// Classic Brent root bracketing refinement.
inline double brent_root(const std::function<double(double)>& f, double a, double b,
                         double fa, double fb, double xtol) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("brent_root: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < 200; ++it) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol || fb == 0.0) return b;
        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol) ? d : (xm > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// field-dressed scans
// ---------------------------------------------------------------------------

struct ScanPoint {
    double x00 = 0.0;
    double m0 = 0.0;
    bool pole_flag = false;
    double bracket_lo = 0.0, bracket_hi = 0.0;  // populated on pole markers
};

struct Resonance {
    double position = 0.0;
    int ell_label = 0;    // 2*n_appear - 1
    int n_appear = 0;     // minimal channel count showing the divergence
    int side_sign = 0;    // sign of M0 below the pole
    double width = 0.0;   // |M0| > 10x median band around the pole
    bool ambiguous = false;
};

struct ScanConfig {
    int m = 0;
    double intensity = 6.0;
    int n_channels = 3;
    refpairs::Bc bc = refpairs::Bc::bc2;
    double x00_lo = 0.142152;
    double x00_hi = 0.152135;
    int points = 150;
    volfit::TraceConfig trace;  // xmax grid / tolerances; m, intensity, n, bc overridden
    unsigned workers = 0;
};

struct ScanCurve {
    std::vector<ScanPoint> points;
    ScanConfig config;
    std::vector<Resonance> resonances;
};

// Determinant of the nodal system at fixed x_max: a smooth function of the
// nodal parameter whose zeros are threshold bound states (the divergences
// of the generalized volume), including the narrow high-l ones that hide
// between any practical M0 grid points.
inline double nodal_det(const ScanConfig& cfg, double x00) {
    ccsolve::SolveRequest req;
    req.channels = potentials::make_channels(cfg.m, cfg.n_channels);
    req.intensity = cfg.intensity;
    req.nodal.x00 = x00;
    req.bc = cfg.bc;
    req.x_max = cfg.trace.xmax_hi;
    req.grid = cfg.trace.grid;
    return ccsolve::threshold_solution(req).nodal_det;
}

// Root of the nodal determinant inside [lo, hi], if any: presample for a
// sign change, then Brent.
inline std::optional<double> find_det_zero(const ScanConfig& cfg, double lo, double hi,
                                           int presample = 16) {
    double xp = lo, fp = nodal_det(cfg, lo);
    for (int i = 1; i <= presample; ++i) {
        const double x = lo + (hi - lo) * i / presample;
        const double f = nodal_det(cfg, x);
        if (fp == 0.0) return xp;
        if (fp * f < 0.0) {
            auto fn = [&](double xx) { return nodal_det(cfg, xx); };
            return brent_root(fn, xp, x, fp, f, 1e-7);
        }
        xp = x;
        fp = f;
    }
    return std::nullopt;
}

namespace detail {

inline volfit::TraceConfig trace_config(const ScanConfig& cfg, double x00) {
    volfit::TraceConfig tc = cfg.trace;
    tc.m = cfg.m;
    tc.intensity = cfg.intensity;
    tc.n_channels = cfg.n_channels;
    tc.bc = cfg.bc;
    tc.x00 = x00;
    tc.workers = 1;  // parallelism lives at the scan level
    return tc;
}

inline double median_abs(std::vector<double> v) {
    std::vector<double> w;
    for (double x : v)
        if (std::isfinite(x)) w.push_back(std::fabs(x));
    if (w.empty()) return 0.0;
    std::nth_element(w.begin(), w.begin() + w.size() / 2, w.end());
    return w[w.size() / 2];
}

}  // namespace detail

// M0(x00) across a grid, with divergences located by the sign changes of
// 1/M0 (refined by bisection) and flagged as pole markers.
inline ScanCurve scan_x00(const ScanConfig& cfg) {
    if (!(cfg.x00_hi > cfg.x00_lo) || cfg.points < 8)
        throw std::domain_error("scan_x00: bad grid");
    ScanCurve out;
    out.config = cfg;
    out.points.resize(cfg.points);
    par::parallel_for(
        static_cast<std::size_t>(cfg.points),
        [&](std::size_t i) {
            const double x00 =
                cfg.x00_lo + (cfg.x00_hi - cfg.x00_lo) * static_cast<double>(i) / (cfg.points - 1);
            auto vr = volfit::extract_volume(detail::trace_config(cfg, x00));
            out.points[i].x00 = x00;
            if (vr.pole) {
                out.points[i].pole_flag = true;
                out.points[i].m0 = (vr.pole_side >= 0)
                                       ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
            } else {
                out.points[i].m0 = vr.volume;
            }
        },
        cfg.workers);

    // candidate poles: sign change with both neighbors well above the median
    std::vector<double> values;
    for (const auto& p : out.points) values.push_back(p.m0);
    const double med = detail::median_abs(values);
    auto inv_m0 = [&](double x00) {
        auto vr = volfit::extract_volume(detail::trace_config(cfg, x00));
        if (vr.pole) return 0.0;
        return 1.0 / vr.volume;
    };
    for (int i = 0; i + 1 < cfg.points; ++i) {
        const double a = out.points[i].m0, b = out.points[i + 1].m0;
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        const bool sign_change = (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0);
        const bool large = std::fabs(a) > 10.0 * med && std::fabs(b) > 10.0 * med;
        if (!(sign_change && large)) continue;
        const double xa = out.points[i].x00, xb = out.points[i + 1].x00;
        double root;
        if (auto dz = find_det_zero(cfg, xa, xb, 8)) {
            root = *dz;
        } else {
            try {
                root = brent_root(inv_m0, xa, xb, 1.0 / a, 1.0 / b, 1e-6);
            } catch (const std::exception&) {
                root = 0.5 * (xa + xb);
            }
        }
        Resonance r;
        r.position = root;
        r.n_appear = cfg.n_channels;
        r.ell_label = 0;  // labeled by the channel-count tracking pass
        r.side_sign = (a > 0.0) ? 1 : -1;
        // width: |M0| above 10x the scan median around the pole
        double lo = xa, hi = xb;
        for (int k = i; k >= 0 && std::isfinite(out.points[k].m0) &&
                        std::fabs(out.points[k].m0) > 10.0 * med;
             --k)
            lo = out.points[k].x00;
        for (int k = i + 1; k < cfg.points && std::isfinite(out.points[k].m0) &&
                            std::fabs(out.points[k].m0) > 10.0 * med;
             ++k)
            hi = out.points[k].x00;
        r.width = hi - lo;
        out.resonances.push_back(r);
        out.points[i].bracket_lo = xa;
        out.points[i].bracket_hi = xb;
    }
    return out;
}

namespace detail {
// x-grid helper for the field-free seed search (slightly padded window)
inline double seed_grid_point(const ScanConfig& cfg, int i, int count) {
    const double lo = cfg.x00_lo - 2e-3, hi = cfg.x00_hi + 2e-3;
    return lo + (hi - lo) * i / count;
}
}  // namespace detail

// Scans with n = 1..n_max channels; a divergence is labeled by the smallest
// channel count at which it is present, ell = 2*n_appear - 1; poles are
// matched across n by nearest position within a 1e-3 tolerance.
inline std::vector<Resonance> label_resonances(const ScanConfig& base, int n_max,
                                               std::vector<ScanCurve>* curves_out = nullptr) {
    if (n_max < 1) throw std::domain_error("label_resonances: n_max must be >= 1");
    std::vector<Resonance> labeled;
    constexpr double match_tol = 1e-3;
    for (int n = 1; n <= n_max; ++n) {
        ScanConfig cfg = base;
        cfg.n_channels = n;
        auto curve = scan_x00(cfg);
        // narrow high-l divergences hide between grid points; seed a
        // determinant-zero search near the field-free l = 2j-1 threshold
        // states, which the weak dressing shifts only slightly
        for (int j = 2; j <= n; ++j) {
            const int ell = 2 * j - 1;
            auto A = [&](double x) { return growing_coefficient(ell, x); };
            double xp = cfg.x00_lo - 2e-3, fp = A(xp);
            std::vector<double> seeds;
            const int coarse = 24;
            for (int i = 1; i <= coarse; ++i) {
                const double x = detail::seed_grid_point(cfg, i, coarse);
                const double f = A(x);
                if (fp * f < 0.0) seeds.push_back(brent_root(A, xp, x, fp, f, 1e-8));
                xp = x;
                fp = f;
            }
            for (double seed : seeds) {
                bool already = false;
                for (const auto& r : curve.resonances)
                    if (std::fabs(r.position - seed) < 1.5e-3) already = true;
                if (already) continue;
                if (auto dz = find_det_zero(cfg, seed - 1.5e-3, seed + 1.5e-3)) {
                    if (*dz >= cfg.x00_lo && *dz <= cfg.x00_hi) {
                        Resonance r;
                        r.position = *dz;
                        r.n_appear = n;
                        r.side_sign = 0;
                        r.width = 0.0;  // below the grid resolution
                        curve.resonances.push_back(r);
                    }
                }
            }
        }
        std::sort(curve.resonances.begin(), curve.resonances.end(),
                  [](const Resonance& a, const Resonance& b) { return a.position < b.position; });
        std::vector<bool> used(labeled.size(), false);
        for (auto& r : curve.resonances) {
            // nearest previously-labeled pole
            int best = -1;
            double best_d = match_tol;
            for (std::size_t k = 0; k < labeled.size(); ++k) {
                const double d = std::fabs(labeled[k].position - r.position);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(k);
                }
            }
            if (best >= 0) {
                if (used[best]) {  // two new poles competing for one ancestor
                    Resonance fresh = r;
                    fresh.n_appear = n;
                    fresh.ell_label = 2 * n - 1;
                    fresh.ambiguous = true;
                    labeled.push_back(fresh);
                    used.push_back(true);
                } else {
                    labeled[best].position = r.position;  // track the moving pole
                    labeled[best].side_sign = r.side_sign;
                    labeled[best].width = r.width;
                    used[best] = true;
                }
            } else {
                Resonance fresh = r;
                fresh.n_appear = n;
                fresh.ell_label = 2 * n - 1;
                labeled.push_back(fresh);
                used.push_back(true);
            }
        }
        if (curves_out) curves_out->push_back(std::move(curve));
    }
    std::sort(labeled.begin(), labeled.end(),
              [](const Resonance& a, const Resonance& b) { return a.position < b.position; });
    return labeled;
}

}  // namespace dipvol::scan
