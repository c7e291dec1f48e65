#include <cmath>
#include <random>

#include "doctest.h"
#include "dipvol/volfit.hpp"

using namespace dipvol;
using namespace dipvol::volfit;
using lk::BasisTag;
using potentials::MultipoleModel;
using refpairs::Bc;

namespace {
double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

TraceConfig base_config(int m, double I, double x00, int n, Bc bc) {
    TraceConfig cfg;
    cfg.m = m;
    cfg.intensity = I;
    cfg.x00 = x00;
    cfg.n_channels = n;
    cfg.bc = bc;
    return cfg;
}
}  // namespace

TEST_CASE("log grid") {
    auto g = log_grid(20.0, 500.0, 50);
    CHECK(g.size() == 50);
    CHECK(g.front() == 20.0);
    CHECK(rel_err(g.back(), 500.0) < 1e-14);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK_THROWS_AS(log_grid(-1.0, 10.0, 5), std::domain_error);
}

TEST_CASE("field-free trace converges: only the vdW 1/(3x) tail varies") {
    auto cfg = base_config(0, 0.0, 0.1468, 1, Bc::bc2);
    cfg.points = 24;
    auto tr = m_trace(cfg);
    CHECK(!tr.resonant);
    // remove the known vdW tail of the local amplitude; the rest is the
    // x_max-independent constant
    std::vector<double> detrended;
    for (std::size_t i = 0; i < tr.m.size(); ++i)
        detrended.push_back(tr.m[i] - 1.0 / (3.0 * tr.xmax[i]));
    for (double v : detrended)
        CHECK(std::fabs(v - detrended.front()) < 1e-6 * std::max(1.0, std::fabs(v)));
}

TEST_CASE("dressed trace is dominated by the x^2 divergence") {
    auto cfg = base_config(0, 6.0, 0.1468, 2, Bc::bc2);
    cfg.points = 24;
    auto tr = m_trace(cfg);
    const double last = tr.m.back();
    const double x = tr.xmax.back();
    CHECK(rel_err(last / (x * x), -4.0 / 15.0) < 0.02);
}

TEST_CASE("traces are bitwise reproducible") {
    auto cfg = base_config(1, 6.0, 0.1455, 3, Bc::bc2);
    cfg.points = 18;
    cfg.workers = 2;
    auto a = m_trace(cfg);
    auto b = m_trace(cfg);
    for (std::size_t i = 0; i < a.m.size(); ++i) CHECK(a.m[i] == b.m[i]);
}

TEST_CASE("synthetic round-trip: fit recovers expansion coefficients") {
    std::mt19937 rng(41);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.5, 2.5);
    for (int trial = 0; trial < 5; ++trial) {
        potentials::Multipole v;
        v.c3 = u(rng);
        v.c4 = 0.3 * u(rng);
        v.c5 = -0.02 * u(rng);
        v.c6 = u(rng);
        const double m0 = u(rng) - 1.2;
        const auto e = lk::m_expansion(v, Bc::bc2, 0.0, m0);
        MTrace tr;
        tr.config = base_config(0, 1.0, 0.147, 3, Bc::bc2);
        tr.xmax = log_grid(20.0, 500.0, 150);
        MTrace clean = tr;
        for (double x : tr.xmax) {
            const double val = e.eval(x);
            tr.m.push_back(val + 1e-8 * noise(rng));
            clean.m.push_back(val);
        }
        // noiseless data: the basis is complete for the expansion, so every
        // coefficient comes back essentially exactly (no fit bias)
        auto fit0 = fit_expansion(clean);
        for (auto tag : {BasisTag::x2, BasisTag::x1, BasisTag::log_x, BasisTag::one,
                         BasisTag::log_x_over_x, BasisTag::inv_x})
            CHECK(std::fabs(fit0.coef(tag) - e.coef(tag)) <
                  1e-6 * std::max(1.0, std::fabs(e.coef(tag))));
        // with iid 1e-8 noise the leading columns stay within ~100x noise;
        // the near-collinear log-family columns have intrinsic least-squares
        // variances of 1e2..1e5 times the noise on this grid
        auto fit = fit_expansion(tr);
        CHECK(fit.accepted);
        CHECK(std::fabs(fit.coef(BasisTag::x2) - e.coef(BasisTag::x2)) < 1e-6);
        CHECK(std::fabs(fit.coef(BasisTag::x1) - e.coef(BasisTag::x1)) < 1e-6);
        CHECK(std::fabs(fit.coef(BasisTag::log_x) - e.coef(BasisTag::log_x)) < 1e-4);
        CHECK(std::fabs(fit.coef(BasisTag::one) - e.coef(BasisTag::one)) < 1e-3);
        CHECK(std::fabs(fit.coef(BasisTag::inv_x) - e.coef(BasisTag::inv_x)) < 1e-1);
    }
}

TEST_CASE("multichannel fit against the analytic coefficients") {
    auto cfg = base_config(0, 6.0, 0.1468, 3, Bc::bc2);
    auto tr = m_trace(cfg);
    auto fit = fit_expansion(tr);
    const auto vad = potentials::multipole_model(MultipoleModel::adiabatic, 0, 6.0);
    const auto e = lk::m_expansion(vad, Bc::bc2, 0.0, 0.0);
    CHECK(rel_err(fit.coef(BasisTag::x2), e.coef(BasisTag::x2)) < 0.01);
    CHECK(rel_err(fit.coef(BasisTag::x1), e.coef(BasisTag::x1)) < 0.10);
    CHECK(rel_err(fit.coef(BasisTag::log_x), e.coef(BasisTag::log_x)) < 0.10);
    CHECK(fit.condition < 1e12);
    CHECK(std::isfinite(fit.volume));
    CHECK(fit.eta == fit.coef(BasisTag::inv_x));
}

TEST_CASE("BC23 m=0 basis omits the vanished divergences") {
    auto basis = fit_basis(Bc::bc23, 0);
    for (auto tag : basis) {
        CHECK(tag != BasisTag::x2);
        CHECK(tag != BasisTag::log_x_over_x);
    }
    CHECK(fit_basis(Bc::bc23, 1).size() == 8);
    CHECK(fit_basis(Bc::bc2, 0).size() == 8);

    auto cfg = base_config(0, 6.0, 0.1468, 2, Bc::bc23);
    auto fit = fit_expansion(m_trace(cfg));
    CHECK(fit.coef(BasisTag::x2) == 0.0);  // not in the basis
    CHECK(std::isfinite(fit.volume));
}

TEST_CASE("extract_volume: BC23 reports the BC2-equivalent constant") {
    auto cfg = base_config(0, 6.0, 0.1468, 2, Bc::bc23);
    auto vr = extract_volume(cfg);
    CHECK(!vr.pole);
    const auto vad = potentials::multipole_model(MultipoleModel::adiabatic, 0, 6.0);
    const double want = vr.volume - lk::delta_m0(vad.c3, vad.c4, vad.c3);
    CHECK(rel_err(vr.volume_bc2_equiv, want) < 1e-12);
}

TEST_CASE("fit preconditions") {
    MTrace tr;
    tr.config = base_config(0, 6.0, 0.147, 1, Bc::bc2);
    tr.xmax = log_grid(20.0, 500.0, 10);  // too few samples for 8 basis terms
    tr.m.assign(10, 1.0);
    CHECK_THROWS_AS(fit_expansion(tr), std::domain_error);
    tr.resonant = true;
    CHECK_THROWS_AS(fit_expansion(tr), std::runtime_error);
}

TEST_CASE("linear relation") {
    std::vector<double> v, eta;
    for (int i = 0; i < 15; ++i) {
        const double vv = -2.0 + 0.3 * i;
        v.push_back(vv);
        eta.push_back(-1.0667 * vv + 0.9996);
    }
    auto lr = linear_relation(v, eta);
    CHECK(rel_err(lr.alpha, -1.0667) < 1e-12);
    CHECK(rel_err(lr.beta, 0.9996) < 1e-12);
    CHECK(lr.r2 > 0.999999);
    CHECK_THROWS_AS(linear_relation({1.0, 2.0}, {1.0, 2.0}), std::domain_error);
    std::vector<double> flat(12, 1.0);
    CHECK_THROWS_AS(linear_relation(flat, flat), std::runtime_error);
}
