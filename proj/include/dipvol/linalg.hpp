#pragma once

// Small dense linear algebra: LU solve with column equilibration and a
// condition estimate, Householder least squares with column scaling, and a
// one-sided Jacobi singular-value routine for condition numbers.  Sizes here
// are tiny (n <= 10 columns), so simplicity beats blocking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dipvol::linalg {

// Row-major dense matrix, just enough interface for this project.
template <class T>
struct MatT {
    std::size_t rows = 0, cols = 0;
    std::vector<T> a;
    MatT() = default;
    MatT(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}
    T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    T operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};
using Mat = MatT<double>;

template <class T>
struct LuSolveResultT {
    std::vector<T> x;
    T condition = T(0);   // 1-norm condition of the column-equilibrated matrix
    T det = T(0);         // determinant of the column-equilibrated matrix
    bool near_singular = false;
};
using LuSolveResult = LuSolveResultT<double>;

namespace detail {

template <class T>
T norm1(const MatT<T>& m) {
    T best = T(0);
    for (std::size_t j = 0; j < m.cols; ++j) {
        T s = T(0);
        for (std::size_t i = 0; i < m.rows; ++i) s += std::fabs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

// LU factorization with partial pivoting, in place.  Returns false when a
// pivot underflows to zero.
template <class T>
bool lu_factor(MatT<T>& m, std::vector<std::size_t>& piv) {
    const std::size_t n = m.rows;
    piv.resize(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        T best = std::fabs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > best) { best = std::fabs(m(i, k)); p = i; }
        if (best == T(0)) return false;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            std::swap(piv[k], piv[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            const T lik = m(i, k);
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= lik * m(k, j);
        }
    }
    return true;
}

template <class T>
void lu_solve_inplace(const MatT<T>& lu, const std::vector<std::size_t>& piv,
                      const std::vector<T>& b, std::vector<T>& x) {
    const std::size_t n = lu.rows;
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
        x[i] /= lu(i, i);
    }
}

}  // namespace detail

// Solve A x = b for square A.  Columns are equilibrated to unit max-norm
// before factorization; the reported condition refers to the equilibrated
// system (the relevant one for the solve).
template <class T>
LuSolveResultT<T> solve_square(MatT<T> A, std::vector<T> b) {
    const std::size_t n = A.rows;
    if (A.cols != n || b.size() != n) throw std::invalid_argument("solve_square: shape mismatch");
    std::vector<T> colscale(n, T(1));
    for (std::size_t j = 0; j < n; ++j) {
        T mx = T(0);
        for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::fabs(A(i, j)));
        if (mx > T(0)) {
            // power of two, so descaling is exact
            colscale[j] = std::exp2(std::round(static_cast<double>(std::log2(mx))));
            for (std::size_t i = 0; i < n; ++i) A(i, j) /= colscale[j];
        }
    }
    MatT<T> lu = A;
    std::vector<std::size_t> piv;
    LuSolveResultT<T> out;
    if (!detail::lu_factor(lu, piv)) {
        out.near_singular = true;
        out.condition = std::numeric_limits<T>::infinity();
        out.det = T(0);
        out.x.assign(n, T(0));
        return out;
    }
    {
        T d = T(1);
        for (std::size_t i = 0; i < n; ++i) d *= lu(i, i);
        // pivot parity
        int swaps = 0;
        std::vector<std::size_t> p = piv;
        for (std::size_t i = 0; i < n; ++i)
            while (p[i] != i) {
                std::swap(p[i], p[p[i]]);
                ++swaps;
            }
        out.det = (swaps % 2 == 0) ? d : -d;
    }
    std::vector<T> y;
    detail::lu_solve_inplace(lu, piv, b, y);
    out.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.x[j] = y[j] / colscale[j];

    // condition = ||A||_1 * ||A^-1||_1 via the explicit inverse (n is tiny)
    MatT<T> inv(n, n);
    std::vector<T> e(n, T(0)), col;
    for (std::size_t j = 0; j < n; ++j) {
        e.assign(n, T(0));
        e[j] = T(1);
        detail::lu_solve_inplace(lu, piv, e, col);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    out.condition = detail::norm1(A) * detail::norm1(inv);
    out.near_singular = !(out.condition < T(1e14));
    return out;
}

// Singular values by one-sided Jacobi orthogonalization of the columns.
// Good to machine precision for the small column counts used here.
template <class T>
std::vector<T> singular_values(MatT<T> A) {
    using std::fabs;
    using std::sqrt;
    const std::size_t m = A.rows, n = A.cols;
    for (int sweep = 0; sweep < 60; ++sweep) {
        T off = T(0);
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                T app = T(0), aqq = T(0), apq = T(0);
                for (std::size_t i = 0; i < m; ++i) {
                    app += A(i, p) * A(i, p);
                    aqq += A(i, q) * A(i, q);
                    apq += A(i, p) * A(i, q);
                }
                if (fabs(apq) <= T(1e-32) * sqrt(app * aqq) + T(1e-300)) continue;
                off = std::max(off, fabs(apq) / (sqrt(app * aqq) + T(1e-300)));
                const T tau = (aqq - app) / (T(2) * apq);
                const T t = (tau >= T(0) ? T(1) : T(-1)) / (fabs(tau) + sqrt(T(1) + tau * tau));
                const T cs = T(1) / sqrt(T(1) + t * t);
                const T sn = cs * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const T ap = A(i, p), aq = A(i, q);
                    A(i, p) = cs * ap - sn * aq;
                    A(i, q) = sn * ap + cs * aq;
                }
            }
        }
        if (off < T(1e-15)) break;
    }
    std::vector<T> sv(n, T(0));
    for (std::size_t j = 0; j < n; ++j) {
        T s = T(0);
        for (std::size_t i = 0; i < m; ++i) s += A(i, j) * A(i, j);
        sv[j] = sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), [](T a, T b) { return a > b; });
    return sv;
}

template <class T>
struct LsqResultT {
    std::vector<T> coef;
    T residual_rms = T(0);        // rms residual / rms of the data
    T condition = T(0);           // of the column-scaled design matrix
};
using LsqResult = LsqResultT<double>;

// Linear least squares min ||A c - y|| via Householder QR on the
// column-scaled design matrix.
template <class T>
LsqResultT<T> least_squares(MatT<T> A, std::vector<T> y) {
    using std::sqrt;
    const std::size_t m = A.rows, n = A.cols;
    if (y.size() != m || m < n) throw std::invalid_argument("least_squares: shape mismatch");
    std::vector<T> colscale(n, T(1));
    for (std::size_t j = 0; j < n; ++j) {
        T s = T(0);
        for (std::size_t i = 0; i < m; ++i) s += A(i, j) * A(i, j);
        s = sqrt(s);
        if (s > T(0)) {
            colscale[j] = s;
            for (std::size_t i = 0; i < m; ++i) A(i, j) /= s;
        }
    }
    LsqResultT<T> out;
    {
        const auto sv = singular_values(A);
        out.condition = (sv.back() > T(0)) ? sv.front() / sv.back()
                                           : std::numeric_limits<T>::infinity();
    }
    MatT<T> R = A;
    std::vector<T> rhs = y;
    // Householder
    for (std::size_t k = 0; k < n; ++k) {
        T nrm = T(0);
        for (std::size_t i = k; i < m; ++i) nrm += R(i, k) * R(i, k);
        nrm = sqrt(nrm);
        if (nrm == T(0)) continue;
        const T alpha = (R(k, k) > T(0)) ? -nrm : nrm;
        std::vector<T> v(m - k);
        v[0] = R(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = R(i, k);
        T vtv = T(0);
        for (T w : v) vtv += w * w;
        if (vtv == T(0)) continue;
        R(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) R(i, k) = T(0);
        for (std::size_t j = k + 1; j < n; ++j) {
            T dot = T(0);
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * R(i, j);
            const T f = T(2) * dot / vtv;
            for (std::size_t i = k; i < m; ++i) R(i, j) -= f * v[i - k];
        }
        T dot = T(0);
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * rhs[i];
        const T f = T(2) * dot / vtv;
        for (std::size_t i = k; i < m; ++i) rhs[i] -= f * v[i - k];
    }
    std::vector<T> c(n, T(0));
    for (std::size_t i = n; i-- > 0;) {
        T s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= R(i, j) * c[j];
        if (R(i, i) == T(0)) throw std::runtime_error("least_squares: rank deficient");
        c[i] = s / R(i, i);
    }
    out.coef.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.coef[j] = c[j] / colscale[j];

    T rss = T(0), yss = T(0);
    for (std::size_t i = n; i < m; ++i) rss += rhs[i] * rhs[i];  // tail of Q^T y
    for (T v : y) yss += v * v;
    out.residual_rms = (yss > T(0)) ? sqrt(rss / yss) : sqrt(rss / T(m));
    return out;
}

// Least squares with iterative refinement: when A and y are exact, the
// refinement steps remove the solve's own rounding, which otherwise limits
// the small-normed columns' coefficients to cond * eps * ||large coef||.
template <class T>
LsqResultT<T> least_squares_refined(const MatT<T>& A, const std::vector<T>& y, int refine = 2) {
    auto out = least_squares(A, y);
    const std::size_t m = A.rows, n = A.cols;
    for (int pass = 0; pass < refine; ++pass) {
        std::vector<T> r = y;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) r[i] -= A(i, j) * out.coef[j];
        auto corr = least_squares(A, r);
        for (std::size_t j = 0; j < n; ++j) out.coef[j] += corr.coef[j];
        out.residual_rms = corr.residual_rms;  // residual of the refined fit
    }
    if (refine > 0) {
        // recompute the relative residual against the original data scale
        T rss = T(0), yss = T(0);
        for (std::size_t i = 0; i < m; ++i) {
            T r = y[i];
            for (std::size_t j = 0; j < n; ++j) r -= A(i, j) * out.coef[j];
            rss += r * r;
            yss += y[i] * y[i];
        }
        using std::sqrt;
        out.residual_rms = (yss > T(0)) ? sqrt(rss / yss) : sqrt(rss / T(m));
    }
    return out;
}

// Ordinary least squares of y on x with intercept: y = a*x + b.
struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: bad sizes");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    if (!(vx > 0.0)) throw std::runtime_error("fit_line: degenerate x spread");
    LineFit out;
    out.slope = cxy / vx;
    out.intercept = (sy - out.slope * sx) / n;
    out.r2 = (vy > 0.0) ? (cxy * cxy) / (vx * vy) : 1.0;
    return out;
}

}  // namespace dipvol::linalg
