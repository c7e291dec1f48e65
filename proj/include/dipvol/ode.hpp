#pragma once

// Embedded Dormand-Prince 5(4) stepper with PI step control.  Works in
// either direction of x.  Error weights can be supplied per component, which
// the coupled-channel solver uses to keep columns of very different
// magnitude under a common relative control.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace dipvol::ode {

struct Options {
    double rtol = 1e-12;
    double atol = 0.0;          // absolute floor added to every weight
    double h_init = 0.0;        // 0 = pick automatically
    double h_min_factor = 1e-14;  // step underflow guard, relative to |x|
    std::size_t max_steps = 2'000'000;
};

// weight_fn(y, w): fill w_i with the error scale for component i.  Pass
// nullptr for the default atol + rtol*|y_i|.
template <class T>
using WeightFnT = std::function<void(const std::vector<T>&, std::vector<T>&)>;
using WeightFn = WeightFnT<double>;
// max_step_fn(x): local cap on |h| (e.g. a fraction of the local de Broglie
// wavelength).  Pass nullptr for no cap.
using MaxStepFn = std::function<double(double)>;
// on_accept(x, y): called after every accepted step; return false to stop
// the integration at the current state (integrate() then returns normally).
template <class T>
using AcceptFnT = std::function<bool(double, const std::vector<T>&)>;
using AcceptFn = AcceptFnT<double>;

struct StepUnderflow : std::runtime_error {
    double x;
    explicit StepUnderflow(double where)
        : std::runtime_error("ode: step size underflow"), x(where) {}
};

// Integrate y' = f(x, y) from x0 to x1 in place.  f(x, y, dydx).  The
// state type T is double for most uses; the coupled-channel propagation
// runs in long double to keep the weakly populated channels clean.
// weight_fn / max_step_fn / on_accept are optional callables (pass nullptr
// to skip).
template <class Rhs, class T, class Weight = std::nullptr_t,
          class MaxStep = std::nullptr_t, class Accept = std::nullptr_t>
void integrate(Rhs&& f, double& x, std::vector<T>& y, double x1, const Options& opt,
               Weight&& weight_fn = nullptr, MaxStep&& max_step_fn = nullptr,
               Accept&& on_accept = nullptr) {
    constexpr bool has_weight = !std::is_same_v<std::decay_t<Weight>, std::nullptr_t>;
    constexpr bool has_max_step = !std::is_same_v<std::decay_t<MaxStep>, std::nullptr_t>;
    constexpr bool has_accept = !std::is_same_v<std::decay_t<Accept>, std::nullptr_t>;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    const double dir = (x1 >= x) ? 1.0 : -1.0;
    // a sub-roundoff interval is an arrival, not an integration
    if (std::fabs(x1 - x) <= opt.h_min_factor * std::max(1e-3, std::fabs(x))) {
        x = x1;
        return;
    }

    std::vector<T> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<T> yt(n), ynew(n), w(n);

    f(x, y, k1);
    double h = opt.h_init;
    if (h == 0.0) {
        double ynorm = 0.0, dnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ynorm = std::max(ynorm, static_cast<double>(std::fabs(y[i])));
            dnorm = std::max(dnorm, static_cast<double>(std::fabs(k1[i])));
        }
        h = (dnorm > 0.0) ? 0.01 * (ynorm + 1e-30) / dnorm : 1e-3 * std::fabs(x1 - x);
        h = std::min(h, 0.1 * std::fabs(x1 - x));
        if (h <= 0.0) h = 1e-6;
    }
    h *= dir;

    double err_prev = 1.0;
    bool fsal_valid = true;
    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if constexpr (has_max_step) {
            const double cap = max_step_fn(x);
            if (std::fabs(h) > cap) h = dir * cap;
        }
        if (dir * (x + h - x1) > 0.0) h = x1 - x;
        if (std::fabs(h) < opt.h_min_factor * std::max(1e-3, std::fabs(x))) throw StepUnderflow(x);

        if (!fsal_valid) f(x, y, k1);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
        f(x + h / 5.0, yt, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(x + 3.0 * h / 10.0, yt, k3);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + 4.0 * h / 5.0, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(x + 8.0 * h / 9.0, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(x + h, yt, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(x + h, ynew, k7);

        if constexpr (has_weight) {
            weight_fn(ynew, w);
            for (std::size_t i = 0; i < n; ++i) w[i] = T(opt.atol) + T(opt.rtol) * w[i];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                w[i] = T(opt.atol) + T(opt.rtol) * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
        }
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const T e =
                h * (T(e1) * k1[i] + T(e3) * k3[i] + T(e4) * k4[i] + T(e5) * k5[i] +
                     T(e6) * k6[i] + T(e7) * k7[i]);
            if (w[i] > T(0)) {
                const double q = static_cast<double>(e / w[i]);
                err += q * q;
            }
        }
        err = std::sqrt(err / n);

        if (err <= 1.0 || std::fabs(h) <= 1.01 * opt.h_min_factor * std::max(1e-3, std::fabs(x))) {
            x += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            fsal_valid = true;
            if constexpr (has_accept) {
                if (!on_accept(x, y)) return;
            }
            if (dir * (x - x1) >= 0.0) return;
            const double grow =
                0.9 * std::pow(err + 1e-20, -0.7 / 5.0) * std::pow(err_prev + 1e-20, 0.4 / 5.0);
            h *= std::min(5.0, std::max(0.2, grow));
            err_prev = std::max(err, 1e-4);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
            fsal_valid = true;  // k1 still matches (x, y)
        }
    }
    throw std::runtime_error("ode: max step count exceeded");
}

// Fixed-step classical RK4, used as an independent cross-check in tests and
// for simple well-conditioned quadratures of ODE type.
template <class Rhs>
void rk4_fixed(Rhs&& f, double& x, std::vector<double>& y, double x1, std::size_t steps) {
    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), yt(n);
    const double h = (x1 - x) / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        f(x, y, k1);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + 0.5 * h * k1[i];
        f(x + 0.5 * h, yt, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + 0.5 * h * k2[i];
        f(x + 0.5 * h, yt, k3);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * k3[i];
        f(x + h, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        x += h;
    }
    x = x1;
}

}  // namespace dipvol::ode
