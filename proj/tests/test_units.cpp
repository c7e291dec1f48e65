#include <cmath>

#include "doctest.h"
#include "dipvol/units.hpp"

using namespace dipvol::units;

namespace {
double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}
}  // namespace

TEST_CASE("natural-unit identities of the conversion formulas") {
    // hbar = 1, c = 1: mu = 1/2, C6 = 1 -> sigma = 1, epsilon = 1
    auto u = make_unit_system_with(0.5, 1.0, 1.0, 1.0, 1.0, 1.0);
    CHECK(rel_err(u.sigma, 1.0) < 1e-14);
    CHECK(rel_err(u.epsilon, 1.0) < 1e-14);
    // C6 = 16 -> sigma = 2, epsilon = hbar^2/(2 mu sigma^2) = 1/4
    auto u2 = make_unit_system_with(0.5, 16.0, 1.0, 1.0, 1.0, 1.0);
    CHECK(rel_err(u2.sigma, 2.0) < 1e-14);
    CHECK(rel_err(u2.epsilon, 0.25) < 1e-14);
}

TEST_CASE("scaling law: C6 x16 doubles sigma, divides epsilon by 4") {
    auto a = make_unit_system(mass_from_amu(66.0), c6_from_au(6851.0),
                              polarizability_from_au(402.2), polarizability_from_au(402.2));
    auto b = make_unit_system(mass_from_amu(66.0), 16.0 * c6_from_au(6851.0),
                              polarizability_from_au(402.2), polarizability_from_au(402.2));
    CHECK(rel_err(b.sigma, 2.0 * a.sigma) < 1e-12);
    CHECK(rel_err(b.epsilon, a.epsilon / 4.0) < 1e-12);
}

TEST_CASE("defining formulas recomputed in extended precision") {
    // heavy-alkali-like inputs
    const double mu = mass_from_amu(66.4526);
    const double C6 = c6_from_au(6851.0);
    const double a1 = polarizability_from_au(402.2);
    const double a2 = polarizability_from_au(402.2);
    auto u = make_unit_system(mu, C6, a1, a2);

    const long double hb = 1.054571817646156e-34L;
    const long double sig = std::pow(2.0L * mu * (long double)C6 / (hb * hb), 0.25L);
    const long double eps = hb * hb / (2.0L * mu * sig * sig);
    const long double pi = 3.141592653589793238462643383279L;
    const long double beta = 299792458.0L * sig * sig * sig * eps / (12.0L * pi * a1 * a2);
    CHECK(rel_err(u.sigma, static_cast<double>(sig)) < 1e-12);
    CHECK(rel_err(u.epsilon, static_cast<double>(eps)) < 1e-12);
    CHECK(rel_err(u.beta_intensity, static_cast<double>(beta)) < 1e-12);

    // invariants hold to 1e-12 relative
    CHECK(rel_err(std::pow(u.sigma, 4), 2.0 * mu * C6 / (hbar * hbar)) < 1e-12);
    CHECK(rel_err(u.beta_intensity,
                  light_speed * std::pow(u.sigma, 3) * u.epsilon / (12.0 * M_PI * a1 * a2)) <
          1e-12);
    CHECK(u.sigma > 0.0);
    CHECK(u.epsilon > 0.0);
    CHECK(u.beta_intensity > 0.0);
}

TEST_CASE("round trips") {
    auto u = make_unit_system(mass_from_amu(40.0), c6_from_au(3000.0),
                              polarizability_from_au(300.0), polarizability_from_au(250.0));
    for (double x : {1e-9, 3.3e-8, 5.0e-7})
        CHECK(rel_err(u.from_reduced_length(u.to_reduced_length(x)), x) < 1e-12);
    for (double e : {1e-30, 4.7e-28})
        CHECK(rel_err(u.from_reduced_energy(u.to_reduced_energy(e)), e) < 1e-12);
}

TEST_CASE("reduced intensity of a dipole strength") {
    auto u = make_unit_system(mass_from_amu(40.0), c6_from_au(3000.0),
                              polarizability_from_au(300.0), polarizability_from_au(250.0));
    CHECK(dipole_strength_to_ru(0.0, u) == 0.0);
    const double D1 = u.epsilon * std::pow(u.sigma, 3);
    CHECK(rel_err(dipole_strength_to_ru(D1, u), 3.0) < 1e-13);
    CHECK(rel_err(dipole_strength_to_ru(2.5 * D1, u), 7.5) < 1e-13);
    CHECK_THROWS_AS(dipole_strength_to_ru(-1.0, u), std::domain_error);
}

TEST_CASE("domain errors on construction") {
    CHECK_THROWS_AS(make_unit_system(0.0, 1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(make_unit_system(1.0, -1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(make_unit_system(1.0, 1.0, 0.0, 1.0), std::domain_error);
}
