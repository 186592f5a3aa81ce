#pragma once

// Shared mathematical constants, 30 significant digits.
// Each nontrivial value is re-derived by an independent oracle in the test
// suite (alternating-series acceleration for zeta(1/2), AGM product for
// Gamma(1/4), direct summation for zeta(3)).

namespace bterm {

inline constexpr double kPi = 3.14159265358979323846264338328;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082;
inline constexpr double kGamma14 = 3.62560990822190831193068515587;    // Gamma(1/4)
inline constexpr double kZetaHalf = -1.46035450880958681288949915252;  // zeta(1/2)
inline constexpr double kZeta3 = 1.20205690315959428539973816151;      // zeta(3)

}  // namespace bterm
