#pragma once

#include <numbers>

// CODATA 2018. h, k_B and c are exact by definition of the SI.
namespace optomech::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double hbar = planck / two_pi;           // J s
inline constexpr double boltzmann = 1.380649e-23;         // J / K
inline constexpr double speed_of_light = 299792458.0;     // m / s

}  // namespace optomech::constants
