#pragma once

namespace qlm {

// Atomic units (hbar = m_e = |e| = 1) everywhere.
inline constexpr double speed_of_light = 137.035999;
inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace qlm
