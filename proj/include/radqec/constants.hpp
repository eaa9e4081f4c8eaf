#pragma once

namespace radqec {

// CODATA 2018 values; the first four are exact SI definitions.
inline constexpr double kPlanck = 6.62607015e-34;        // J s
inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kBoltzmann = 1.380649e-23;       // J / K
inline constexpr double kElectronVolt = 1.602176634e-19; // J
inline constexpr double kElectronMass = 9.1093837015e-31; // kg

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Unit helpers used throughout: lengths in mm on chip scale, densities in
// um^-3, times in s at API boundaries and us inside the integrator.
inline constexpr double kMicroeVToJoule = 1e-6 * kElectronVolt;
inline constexpr double kUsToS = 1e-6;
inline constexpr double kSToUs = 1e6;

} // namespace radqec
