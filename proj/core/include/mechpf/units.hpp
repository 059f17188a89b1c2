#pragma once

#include <complex>
#include <numbers>

namespace mechpf {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad(double f_hz) noexcept { return kTwoPi * f_hz; }
constexpr double rad_to_hz(double omega) noexcept { return omega / kTwoPi; }

}  // namespace mechpf
