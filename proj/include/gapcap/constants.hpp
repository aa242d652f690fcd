#pragma once

namespace gapcap {

// CODATA 2018 exact/defined values.
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

}  // namespace gapcap
