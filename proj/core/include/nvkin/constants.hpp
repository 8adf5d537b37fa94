#pragma once

#include <numbers>

namespace nvkin::constants {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double boltzmann = 1.380649e-23;        // J / K
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J / T
inline constexpr double speed_of_light = 299792458.0;    // m / s

inline constexpr double pi = std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// Electron gyromagnetic ratio g * mu_B / h in Hz per tesla.
inline constexpr double gyromagnetic_hz_per_tesla(double g_factor) {
  return g_factor * bohr_magneton / planck;
}

}  // namespace nvkin::constants
