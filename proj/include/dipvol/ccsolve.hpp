#pragma once

// Threshold solution of the coupled odd-wave system
//   u_i'' = sum_j W_ij(x) u_j,   W = centrifugal - vdW - dipolar coupling,
// by inward integration from x_max with imposed asymptotic forms and a
// nodal-line short-range boundary condition: 2n particular solutions are
// propagated jointly (for each channel l_j, a pair seeded with the growing
// and decaying reference function in that channel alone), and the physical
// combination z = f1+ - sum_j Mbar_j fj- is fixed by requiring z to vanish
// on the per-channel nodal positions.  Mbar_1 is the relative amplitude
// M(x_max) of the p-wave component.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dipvol/linalg.hpp"
#include "dipvol/ode.hpp"
#include "dipvol/potentials.hpp"
#include "dipvol/refpairs.hpp"
#include "dipvol/specfun.hpp"

namespace dipvol::ccsolve {

using potentials::ChannelSet;
using refpairs::Bc;

struct NodalLine {
    double x00 = 0.0;
    double gamma_E = 0.0;  // energy slope of the wall position
    double gamma_L = 0.0;  // l(l+1) slope
    double gamma_I = 0.0;  // intensity slope
};

inline double nodal_position(const NodalLine& nl, double E, int ell, double intensity) {
    const double x0 = nl.x00 + nl.gamma_E * E + nl.gamma_L * ell * (ell + 1.0) +
                      nl.gamma_I * intensity;
    if (!(x0 > 0.0)) throw std::domain_error("nodal_position: resulting x0 must be > 0");
    return x0;
}

struct GridControl {
    double rtol = 1e-12;
    double wavelength_fraction = 1.0 / 40.0;  // step cap vs local de Broglie wavelength
    std::size_t max_steps = 4'000'000;
};

struct SolveRequest {
    ChannelSet channels;
    double intensity = 0.0;
    NodalLine nodal;
    Bc bc = Bc::bc2;
    double x_max = 500.0;
    GridControl grid;
};

inline void validate(const SolveRequest& req) {
    if (req.channels.n < 1) throw std::domain_error("SolveRequest: need n >= 1");
    if (req.intensity < 0.0) throw std::domain_error("SolveRequest: intensity must be >= 0");
    if (req.bc != Bc::bc2 && req.bc != Bc::bc23)
        throw std::domain_error("SolveRequest: bc must be BC2 or BC23");
    double x0max = 0.0;
    for (int l : req.channels.ells)
        x0max = std::max(x0max, nodal_position(req.nodal, 0.0, l, req.intensity));
    if (!(req.x_max > 2.0 * x0max))
        throw std::domain_error("SolveRequest: x_max must lie well outside the nodal positions");
    if (!(req.x_max >= 10.0))
        throw std::domain_error("SolveRequest: x_max below the asymptotic region");
}

// c3 of the effective p-wave models at this (m, intensity); the BC23
// reference potential uses its magnitude.
inline double p_wave_c3(int m, double intensity) {
    return (m == 0 ? 4.0 : -2.0) * intensity / 15.0;
}

// One pair of boundary columns for channel index j (0-based): the component
// in channel l_j is set to the reference pair at x_max, all other channels
// start at zero.  BC23 applies to the p-channel pair only; with zero
// intensity it degenerates to BC2 (flagged).
struct BoundaryPair {
    std::vector<double> plus;   // [u_0..u_{n-1}, u'_0..u'_{n-1}]
    std::vector<double> minus;
    bool bc23_fallback = false;
};

inline BoundaryPair boundary_init(const SolveRequest& req, int j) {
    validate(req);
    const int n = req.channels.n;
    if (j < 0 || j >= n) throw std::domain_error("boundary_init: channel index out of range");
    BoundaryPair out;
    out.plus.assign(2 * n, 0.0);
    out.minus.assign(2 * n, 0.0);
    const int ell = req.channels.ells[j];
    refpairs::RefPairSpec spec = refpairs::RefPairSpec::bc2(ell);
    if (req.bc == Bc::bc23 && j == 0) {
        const double c3f = std::fabs(p_wave_c3(req.channels.m, req.intensity));
        if (c3f > 0.0)
            spec = refpairs::RefPairSpec::bc23(ell, c3f);
        else
            out.bc23_fallback = true;  // field-free: BC23 degenerates to BC2
    }
    const auto p = refpairs::eval_pair(spec, req.x_max);
    out.plus[j] = p.phi;
    out.plus[n + j] = p.dphi;
    out.minus[j] = p.psi;
    out.minus[n + j] = p.dpsi;
    return out;
}

// Values of every propagated solution in every channel at the per-channel
// nodal positions.  value(i, c) = component l_i of column c evaluated at
// x0(l_i); columns 0..n-1 are f+ pairs, n..2n-1 are f- pairs.
struct InwardValues {
    int n = 0;
    std::vector<long double> values;  // n rows x 2n cols, row-major
    bool bc23_fallback = false;
    long double& at(int i, int c) { return values[i * 2 * n + c]; }
    long double at(int i, int c) const { return values[i * 2 * n + c]; }
};

namespace detail {

struct CoupledRhs {
    int n;
    std::vector<int> ells;
    std::vector<double> lfac;   // l(l+1)
    std::vector<double> aniso;  // n x n anisotropy matrix
    double intensity;

    explicit CoupledRhs(const ChannelSet& ch, double I) : n(ch.n), ells(ch.ells), intensity(I) {
        lfac.resize(n);
        aniso.resize(n * n);
        for (int i = 0; i < n; ++i) {
            lfac[i] = ells[i] * (ells[i] + 1.0);
            for (int j = 0; j < n; ++j)
                aniso[i * n + j] = potentials::anisotropy_coupling(ells[i], ells[j], ch.m);
        }
    }

    // y: 2n columns, each [u_0..u_{n-1}, u'_0..u'_{n-1}].  Long double
    // state: the weakly populated channels sit many orders below the column
    // scale and double-precision propagation noise in them is amplified by
    // the inward growth into the nodal system.
    void operator()(double x, const std::vector<long double>& y,
                    std::vector<long double>& dy) const {
        const long double xl = x;
        const long double x2 = xl * xl;
        const long double inv_x2 = 1.0L / x2;
        const long double inv_x3 = inv_x2 / xl;
        const long double inv_x6 = inv_x3 * inv_x3;
        const int ncols = 2 * n;
        const int stride = 2 * n;
        for (int c = 0; c < ncols; ++c) {
            const long double* u = &y[c * stride];
            const long double* up = u + n;
            long double* du = &dy[c * stride];
            long double* dup = du + n;
            for (int i = 0; i < n; ++i) {
                du[i] = up[i];
                long double acc = ((long double)lfac[i] * inv_x2 - inv_x6) * u[i];
                const double* ai = &aniso[i * n];
                for (int j = 0; j < n; ++j)
                    acc -= (long double)intensity * (long double)ai[j] * inv_x3 * u[j];
                dup[i] = acc;
            }
        }
    }

    double local_wavenumber(double x) const {
        const double inv_x2 = 1.0 / (x * x);
        const double inv_x6 = inv_x2 * inv_x2 * inv_x2;
        double wmax = 0.0;
        for (int i = 0; i < n; ++i)
            wmax = std::max(wmax, std::fabs(lfac[i] * inv_x2 - inv_x6));
        return std::sqrt(wmax) + 1.0 / x;
    }
};

}  // namespace detail

namespace detail {

// Modified Gram-Schmidt on the 2n state columns: state -> Q, returns R with
// state_old = Q R.  Keeps the propagated basis orthonormal so that roundoff
// contamination of the weakly growing directions is bounded by one
// segment's amplification instead of the whole range's.
inline linalg::MatT<long double> orthonormalize_columns(std::vector<long double>& y, int dim) {
    linalg::MatT<long double> R(dim, dim);
    for (int j = 0; j < dim; ++j) {
        long double* cj = &y[j * dim];
        for (int i = 0; i < j; ++i) {
            const long double* ci = &y[i * dim];
            long double dot = 0.0L;
            for (int k = 0; k < dim; ++k) dot += ci[k] * cj[k];
            R(i, j) = dot;
            for (int k = 0; k < dim; ++k) cj[k] -= dot * ci[k];
        }
        long double nrm = 0.0L;
        for (int k = 0; k < dim; ++k) nrm += cj[k] * cj[k];
        nrm = std::sqrt(nrm);
        if (!(nrm > 1e-280L))
            throw std::runtime_error("integrate_inward: degenerate solution set");
        R(j, j) = nrm;
        for (int k = 0; k < dim; ++k) cj[k] /= nrm;
    }
    return R;
}

}  // namespace detail

// Propagate all 2n boundary solutions from x_max down to the innermost
// nodal position with stabilized marching (re-orthonormalization at
// geometric interior points, exact triangular bookkeeping), and return the
// channel values of the original-boundary solutions at each channel's wall.
// The optional observer sees, at every requested sample_x (strictly
// descending), the original-column value matrix v(i, c) laid out like
// InwardValues plus the derivative rows: a 2n x 2n row-major matrix with
// rows 0..n-1 the channel values and rows n..2n-1 the channel derivatives.
inline InwardValues integrate_inward(
    const SolveRequest& req,
    const std::vector<double>& sample_x = {},
    const std::function<void(double, const linalg::Mat&)>& on_sample = nullptr) {
    validate(req);
    const int n = req.channels.n;
    const int dim = 2 * n;
    InwardValues out;
    out.n = n;
    out.values.assign(n * dim, 0.0);

    // initial state, column-scaled by powers of two
    std::vector<long double> y(dim * dim, 0.0L);
    std::vector<double> colscale(dim, 1.0);
    for (int j = 0; j < n; ++j) {
        auto bp = boundary_init(req, j);
        out.bc23_fallback = out.bc23_fallback || bp.bc23_fallback;
        for (int i = 0; i < dim; ++i) {
            y[j * dim + i] = bp.plus[i];
            y[(n + j) * dim + i] = bp.minus[i];
        }
    }
    for (int c = 0; c < dim; ++c) {
        double mx = 0.0;
        for (int i = 0; i < dim; ++i)
            mx = std::max(mx, static_cast<double>(std::fabs(y[c * dim + i])));
        colscale[c] = std::exp2(std::round(std::log2(mx)));
        for (int i = 0; i < dim; ++i) y[c * dim + i] /= (long double)colscale[c];
    }

    detail::CoupledRhs rhs(req.channels, req.intensity);

    std::vector<double> x0(n);
    for (int i = 0; i < n; ++i)
        x0[i] = nodal_position(req.nodal, 0.0, req.channels.ells[i], req.intensity);
    const double x0_max = *std::max_element(x0.begin(), x0.end());

    // event points, descending: samples, walls, and re-orthonormalization
    // points every factor of two down to just outside the walls
    struct Event {
        double x;
        bool ortho = false, sample = false;
    };
    std::vector<Event> events;
    for (double v : sample_x) {
        if (!(v < req.x_max)) throw std::domain_error("integrate_inward: sample beyond x_max");
        events.push_back({v, false, true});
    }
    for (double v : x0) events.push_back({v, false, false});
    // absolute ladder (powers of two): the re-orthonormalization points are
    // shared by solves with different x_max, so their bookkeeping error is
    // smooth in x_max instead of aliasing into the trace fit
    {
        double xo = std::exp2(std::floor(std::log2(req.x_max * (1.0 - 1e-12))));
        for (; xo > std::max(1.0, 2.0 * x0_max); xo *= 0.5) events.push_back({xo, true, false});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.x > b.x; });
    // merge coincident points
    std::vector<Event> merged;
    for (const auto& e : events) {
        if (!merged.empty() && merged.back().x == e.x) {
            merged.back().ortho = merged.back().ortho || e.ortho;
            merged.back().sample = merged.back().sample || e.sample;
        } else {
            merged.push_back(e);
        }
    }

    ode::Options opt;
    opt.rtol = req.grid.rtol;
    opt.atol = 0.0;
    opt.max_steps = req.grid.max_steps;
    // per-component relative control with a small floor tied to the column's
    // value/derivative scale: a loose (column-max) weight would let the
    // integrator seed the weakly-populated channels with absolute errors of
    // rtol * colmax, which the inward growth then amplifies into the nodal
    // system
    ode::WeightFnT<long double> weight = [&](const std::vector<long double>& yy,
                                             std::vector<long double>& ww) {
        for (int c = 0; c < dim; ++c) {
            long double su = 0.0L, sp = 0.0L;
            for (int i = 0; i < n; ++i) {
                su = std::max(su, std::fabs(yy[c * dim + i]));
                sp = std::max(sp, std::fabs(yy[c * dim + n + i]));
            }
            su = std::max(1e-8L * su, 1e-300L);
            sp = std::max(1e-8L * sp, 1e-300L);
            for (int i = 0; i < n; ++i) {
                ww[c * dim + i] = std::max(std::fabs(yy[c * dim + i]), su);
                ww[c * dim + n + i] = std::max(std::fabs(yy[c * dim + n + i]), sp);
            }
        }
    };
    auto max_step = [&](double x) {
        const double lam = 2.0 * specfun::pi / rhs.local_wavenumber(x);
        return std::max(req.grid.wavelength_fraction * lam, 1e-12 * x);
    };

    // original columns at x: state(x) * T, T the product of the R factors
    linalg::MatT<long double> T(dim, dim);
    for (int i = 0; i < dim; ++i) T(i, i) = 1.0L;
    auto compose_values = [&](const std::vector<long double>& state) {
        linalg::MatT<long double> v(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int c = 0; c < dim; ++c) {
                long double acc = 0.0L;
                for (int k = 0; k < dim; ++k) acc += state[k * dim + i] * T(k, c);
                v(i, c) = acc * (long double)colscale[c];
            }
        return v;
    };

    double x = req.x_max;
    for (const auto& ev : merged) {
        try {
            ode::integrate(rhs, x, y, ev.x, opt, weight, max_step);
        } catch (const ode::StepUnderflow& e) {
            throw std::runtime_error("integrate_inward: step underflow near the 1/x^6 wall at x=" +
                                     std::to_string(e.x));
        }
        if (ev.ortho) {
            auto R = detail::orthonormalize_columns(y, dim);
            linalg::MatT<long double> Tn(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    long double acc = 0.0L;
                    for (int k = i; k < dim; ++k) acc += R(i, k) * T(k, j);
                    Tn(i, j) = acc;
                }
            T = Tn;
        }
        if (ev.sample && on_sample) {
            const auto v = compose_values(y);
            linalg::Mat vd(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int c = 0; c < dim; ++c) vd(i, c) = static_cast<double>(v(i, c));
            on_sample(ev.x, vd);
        }
        for (int i = 0; i < n; ++i) {
            if (std::fabs(ev.x - x0[i]) < 1e-15 * std::max(1.0, x0[i])) {
                const auto v = compose_values(y);
                for (int c = 0; c < dim; ++c) out.at(i, c) = v(i, c);
            }
        }
    }
    return out;
}

struct ThresholdSolution {
    std::vector<double> mbar;      // mixing coefficients, mbar[0] = M(x_max)
    double m_at_xmax = 0.0;
    InwardValues channel_values;   // diagnostics
    double condition = 0.0;        // of the equilibrated nodal system
    double nodal_det = 0.0;        // det of the equilibrated nodal system;
                                   // zero exactly at a threshold bound state
    double nodal_residual = 0.0;   // max |z(x0)| / local scale
    bool near_pole = false;        // nodal system (numerically) singular
    bool bc23_fallback = false;
};

inline ThresholdSolution threshold_solution(const SolveRequest& req) {
    const int n = req.channels.n;
    ThresholdSolution out;
    out.channel_values = integrate_inward(req);
    out.bc23_fallback = out.channel_values.bc23_fallback;

    // the nodal system runs at a condition of ~1e5..1e6 for n = 3; solving
    // in long double keeps the cond*eps floor well below the fit scales
    linalg::MatT<long double> B(n, n);
    std::vector<long double> rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs[i] = out.channel_values.at(i, 0);  // f1+ component at the wall
        for (int j = 0; j < n; ++j) B(i, j) = out.channel_values.at(i, n + j);
    }
    auto sol = linalg::solve_square(B, rhs);
    out.mbar.resize(n);
    for (int j = 0; j < n; ++j) out.mbar[j] = static_cast<double>(sol.x[j]);
    out.m_at_xmax = out.mbar.empty() ? 0.0 : out.mbar[0];
    out.condition = static_cast<double>(sol.condition);
    out.nodal_det = static_cast<double>(sol.det);
    out.near_pole = sol.near_singular || !(sol.condition < 1e10L);

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        long double acc = rhs[i];
        long double scale = std::fabs(rhs[i]);
        for (int j = 0; j < n; ++j) {
            acc -= B(i, j) * sol.x[j];
            scale += std::fabs(B(i, j) * sol.x[j]);
        }
        if (scale > 0.0L)
            worst = std::max(worst, static_cast<double>(std::fabs(acc) / scale));
    }
    out.nodal_residual = worst;
    return out;
}

// Fast trace: one inward pass from the largest x_max; at each interior grid
// point the already-assembled combination z (coefficients fixed by the
// x_max boundary) yields the local relative amplitude of its p-wave
// component through the reference pair at that point.  Exact for n = 1;
// for n > 1 it differs from per-x_max solves by residual channel mixing and
// is validated against them in the tests.
inline std::vector<std::pair<double, double>> fast_trace(const SolveRequest& req,
                                                         std::vector<double> xmax_grid) {
    std::sort(xmax_grid.begin(), xmax_grid.end());
    if (xmax_grid.empty()) return {};
    SolveRequest top = req;
    top.x_max = xmax_grid.back();
    const int n = req.channels.n;

    std::vector<double> interior(xmax_grid.begin(), xmax_grid.end() - 1);
    std::sort(interior.begin(), interior.end(), std::greater<double>());
    // record z1, z1' at each interior point (coefficients known only after
    // the solve, so store the p-channel value and derivative row of every
    // original column)
    std::vector<std::vector<double>> rows;  // per sample: 2n values u_1, then 2n values u_1'
    std::vector<double> xs;
    auto on_sample = [&](double xsmp, const linalg::Mat& v) {
        std::vector<double> row(4 * n);
        for (int c = 0; c < 2 * n; ++c) {
            row[c] = v(0, c);
            row[2 * n + c] = v(n, c);
        }
        rows.push_back(std::move(row));
        xs.push_back(xsmp);
    };

    auto vals = integrate_inward(top, interior, on_sample);
    linalg::MatT<long double> B(n, n);
    std::vector<long double> rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs[i] = vals.at(i, 0);
        for (int j = 0; j < n; ++j) B(i, j) = vals.at(i, n + j);
    }
    auto sol = linalg::solve_square(B, rhs);

    refpairs::RefPairSpec spec = refpairs::RefPairSpec::bc2(1);
    if (req.bc == Bc::bc23) {
        const double c3f = std::fabs(p_wave_c3(req.channels.m, req.intensity));
        if (c3f > 0.0) spec = refpairs::RefPairSpec::bc23(1, c3f);
    }

    std::vector<std::pair<double, double>> ordered(xmax_grid.size());
    ordered.back() = {top.x_max, sol.x.empty() ? 0.0 : static_cast<double>(sol.x[0])};
    for (std::size_t s = 0; s < xs.size(); ++s) {
        double z = rows[s][0];
        double zp = rows[s][2 * n];
        for (int j = 0; j < n; ++j) {
            z -= static_cast<double>(sol.x[j]) * rows[s][n + j];
            zp -= static_cast<double>(sol.x[j]) * rows[s][2 * n + n + j];
        }
        const auto p = refpairs::eval_pair(spec, xs[s]);
        const double m_local = (p.dphi * z - p.phi * zp) / (p.dpsi * z - p.psi * zp);
        for (std::size_t i = 0; i + 1 < xmax_grid.size(); ++i)
            if (xmax_grid[i] == xs[s]) ordered[i] = {xs[s], m_local};
    }
    return ordered;
}

}  // namespace dipvol::ccsolve
