#pragma once

#include <numbers>

// SI values, CODATA 2018 (h, k_B, c exact by definition of the SI).
namespace rotcool::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double h = 6.62607015e-34;          // J s
inline constexpr double hbar = h / (2.0 * pi);       // J s
inline constexpr double k_B = 1.380649e-23;          // J/K
inline constexpr double c = 299792458.0;             // m/s
inline constexpr double epsilon_0 = 8.8541878128e-12;  // F/m
inline constexpr double amu = 1.66053906660e-27;     // kg

}  // namespace rotcool::constants
