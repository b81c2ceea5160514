#pragma once

#include <numbers>
#include <optional>
#include <string_view>

namespace miot {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Multiplier taking an ordinary-frequency unit tag to Hz.
inline std::optional<double> unit_scale(std::string_view unit) {
    if (unit == "Hz") return 1.0;
    if (unit == "kHz") return 1e3;
    if (unit == "MHz") return 1e6;
    return std::nullopt;
}

/// Ordinary frequency in Hz -> angular frequency in rad/s.
constexpr double from_hz(double hz) noexcept { return two_pi * hz; }
constexpr double from_khz(double khz) noexcept { return two_pi * 1e3 * khz; }
constexpr double from_mhz(double mhz) noexcept { return two_pi * 1e6 * mhz; }

/// Angular frequency in rad/s -> ordinary frequency in Hz.
constexpr double to_hz(double rad_per_s) noexcept { return rad_per_s / two_pi; }

} // namespace miot
