#pragma once

// Van der Waals reduced units.  All species information enters through the
// reduced mass, the C6 coefficient and the two static polarizabilities; the
// conversion factors sigma (length), epsilon (energy) and beta (intensity)
// make the asymptotic two-body problem species-independent.
//
// Inputs are SI: mu in kg, C6 in J*m^6, polarizability volumes in m^3
// (Gaussian convention, alpha_SI/(4*pi*eps0)).  Helpers below convert from
// atomic units.

#include <cmath>
#include <stdexcept>

namespace dipvol::units {

// 2019 SI exact values (hbar derived from the exact Planck constant).
inline constexpr double planck_h = 6.62607015e-34;           // J s
inline constexpr double hbar = 1.054571817646156e-34;         // J s, h/(2 pi)
inline constexpr double light_speed = 299792458.0;            // m/s

// CODATA 2018 atomic-unit conversions.
inline constexpr double bohr_radius = 5.29177210903e-11;      // m
inline constexpr double hartree = 4.3597447222071e-18;        // J
inline constexpr double electron_mass = 9.1093837015e-31;     // kg
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

inline double mass_from_amu(double m_amu) { return m_amu * atomic_mass_unit; }
inline double c6_from_au(double c6_au) { return c6_au * hartree * std::pow(bohr_radius, 6); }
inline double polarizability_from_au(double a_au) { return a_au * std::pow(bohr_radius, 3); }
// Dipole-interaction strength (energy*length^3) from atomic units.
inline double dipole_strength_from_au(double d_au) {
    return d_au * hartree * std::pow(bohr_radius, 3);
}

struct UnitSystem {
    double mu = 0.0;              // reduced mass, kg
    double C6 = 0.0;              // J m^6
    double alpha1 = 0.0;          // m^3
    double alpha2 = 0.0;          // m^3
    double sigma = 0.0;           // length unit, m
    double epsilon = 0.0;         // energy unit, J
    double beta_intensity = 0.0;  // intensity unit, W/m^2

    double to_reduced_length(double r_m) const { return r_m / sigma; }
    double from_reduced_length(double x_ru) const { return x_ru * sigma; }
    double to_reduced_energy(double e_J) const { return e_J / epsilon; }
    double from_reduced_energy(double e_ru) const { return e_ru * epsilon; }
    double to_reduced_intensity(double i_W_m2) const { return i_W_m2 / beta_intensity; }
    double from_reduced_intensity(double i_ru) const { return i_ru * beta_intensity; }
};

// sigma = (2 mu C6 / hbar^2)^{1/4},  epsilon = hbar^2/(2 mu sigma^2),
// beta = c sigma^3 epsilon / (12 pi alpha1 alpha2).
// The hbar/c arguments exist so tests can exercise the formulas in natural
// units; production code goes through the SI front end below.
inline UnitSystem make_unit_system_with(double mu, double C6, double alpha1, double alpha2,
                                        double hbar_value, double c_value) {
    if (!(mu > 0.0) || !(C6 > 0.0) || !(alpha1 > 0.0) || !(alpha2 > 0.0))
        throw std::domain_error("make_unit_system: all inputs must be > 0");
    UnitSystem u;
    u.mu = mu;
    u.C6 = C6;
    u.alpha1 = alpha1;
    u.alpha2 = alpha2;
    u.sigma = std::pow(2.0 * mu * C6 / (hbar_value * hbar_value), 0.25);
    u.epsilon = hbar_value * hbar_value / (2.0 * mu * u.sigma * u.sigma);
    constexpr double pi = 3.14159265358979323846;
    u.beta_intensity = c_value * u.sigma * u.sigma * u.sigma * u.epsilon /
                       (12.0 * pi * alpha1 * alpha2);
    return u;
}

inline UnitSystem make_unit_system(double mu, double C6, double alpha1, double alpha2) {
    return make_unit_system_with(mu, C6, alpha1, alpha2, hbar, light_speed);
}

// Reduced intensity equivalent of a dipole-dipole strength D (J m^3):
// I_ru = 3 D / (epsilon sigma^3).
inline double dipole_strength_to_ru(double D, const UnitSystem& u) {
    if (D < 0.0) throw std::domain_error("dipole_strength_to_ru: D must be >= 0");
    return 3.0 * D / (u.epsilon * u.sigma * u.sigma * u.sigma);
}

}  // namespace dipvol::units
