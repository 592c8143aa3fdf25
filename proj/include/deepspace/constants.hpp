#pragma once

#include <numbers>

namespace deepspace {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CODATA 2018 values, SI units.
struct PhysicalConstants {
  double electron_charge = 1.602176634e-19;         // C
  double electron_mass = 9.1093837015e-31;          // kg
  double vacuum_permittivity = 8.8541878128e-12;    // F/m
  double speed_of_light = 299792458.0;              // m/s
  double boltzmann = 1.380649e-23;                  // J/K
  double sun_radius = 6.957e8;                      // m, IAU nominal
  // e^2 / (4 pi eps0 m_e c^2) evaluated from the values above; the published
  // 2.8179403262e-15 differs by 1.7e-12 relative because of input rounding.
  double classical_electron_radius = 2.81794032620493e-15;  // m

  constexpr double derived_electron_radius() const {
    return electron_charge * electron_charge /
           (4.0 * kPi * vacuum_permittivity * electron_mass * speed_of_light * speed_of_light);
  }
};

inline constexpr PhysicalConstants kConstants{};

inline constexpr double kCmbTemperature = 2.761;          // K
inline constexpr double kAstronomicalUnit = 1.495978707e11;  // m

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

inline double wavelength_of(double frequency_hz) { return kConstants.speed_of_light / frequency_hz; }

}  // namespace deepspace
