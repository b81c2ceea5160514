#pragma once

// MIOT peak features (position, height, full width at half maximum) on the
// exact transmission curve, their weak-field approximations, and pulling
// coefficients of the peak position with respect to frequency fluctuations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "miot/core.hpp"
#include "miot/eigenmodes.hpp"
#include "miot/langevin.hpp"
#include "miot/spectrum.hpp"
#include "miot/units.hpp"

namespace miot {

/// eta (gamma + kappa Delta_bar^2 / Omega_N^2).
inline double width_approx(const PhysicalParams& p) noexcept {
    const double db = delta_bar(p.zeeman(), p.gamma);
    return eta_factor(p.g_alpha, p.g_beta) * (p.gamma + p.kappa * db * db / (p.Omega_N * p.Omega_N));
}

/// [Delta_bar^2 / (Delta_bar^2 + (gamma/kappa) Omega_N^2)]^2, independent of g_alpha and g_beta.
inline double height_approx(const PhysicalParams& p) noexcept {
    const double db2 = std::pow(delta_bar(p.zeeman(), p.gamma), 2);
    const double r = db2 / (db2 + p.gamma / p.kappa * p.Omega_N * p.Omega_N);
    return r * r;
}

/// The approximate peak position is the probe resonance itself.
inline constexpr double position_approx = 0.0;

struct SearchWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// [-min(Delta_bar, Omega_N/4), +min(Delta_bar, Omega_N/4)].
inline SearchWindow default_window(const PhysicalParams& p) noexcept {
    const double half = std::min(delta_bar(p.zeeman(), p.gamma), p.Omega_N / 4);
    return {-half, half};
}

struct Peak {
    double position = 0.0;
    double height = 0.0;
    SearchWindow window;
    std::size_t scan_points = 0;
    std::uintmax_t polish_iterations = 0;
    double tolerance = 0.0; ///< width of the final bracket around the position
};

namespace detail {

inline constexpr std::size_t min_scan_points = 2001;
inline constexpr std::size_t max_scan_points = 2'000'001;

// dP_T/d(delta_p) up to the positive factor kappa^2 / (2 s^2).
inline double transmission_slope(const PhysicalParams& p, double delta_p) {
    const auto s = steady_state_with_slope(build_system(p, delta_p));
    return std::real(std::conj(s.value.a_x) * s.d_delta_p.a_x);
}

// Scans `w` with spacing about `step`, then polishes the largest sample.
inline Peak scan_and_polish(const PhysicalParams& p, SearchWindow w, double step) {
    if (!(w.hi > w.lo)) throw Error(ErrorCode::NoPeak, "empty search window");
    const double span = w.hi - w.lo;
    double want = step > 0.0 ? std::ceil(span / step) + 1.0 : 0.0;
    if (!std::isfinite(want)) want = static_cast<double>(max_scan_points);
    const auto n = static_cast<std::size_t>(
        std::clamp(want, static_cast<double>(min_scan_points), static_cast<double>(max_scan_points)));

    const auto at = [&](std::size_t k) {
        return k + 1 == n ? w.hi : w.lo + span * static_cast<double>(k) / static_cast<double>(n - 1);
    };
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = transmission_exact(p, at(k));
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    if (best == 0 || best + 1 == n) throw Error(ErrorCode::NoPeak, "maximum on the search-window boundary");

    Peak peak;
    peak.window = w;
    peak.scan_points = n;
    double a = at(best - 1), b = at(best + 1);
    const double fa = transmission_slope(p, a), fb = transmission_slope(p, b);

    std::uintmax_t iters = 200;
    if (fa > 0.0 && fb < 0.0) {
        const auto r = boost::math::tools::toms748_solve([&](double x) { return transmission_slope(p, x); }, a, b,
                                                         fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                         iters);
        peak.position = 0.5 * (r.first + r.second);
        peak.tolerance = r.second - r.first;
    } else if (fa == 0.0 || fb == 0.0) {
        peak.position = fa == 0.0 ? a : b;
        iters = 0;
    } else {
        // Slope does not change sign cleanly (flat top at rounding level).
        const auto r = boost::math::tools::brent_find_minima([&](double x) { return -transmission_exact(p, x); },
                                                             a, b, 40, iters);
        peak.position = r.first;
        peak.tolerance = std::abs(peak.position) * std::ldexp(1.0, -20) + std::ldexp(1.0, -30);
    }
    peak.polish_iterations = iters;
    peak.height = transmission_exact(p, peak.position);
    if (!(peak.position > w.lo && peak.position < w.hi))
        throw Error(ErrorCode::NoPeak, "maximum on the search-window boundary");
    return peak;
}

} // namespace detail

/// Maximizes the exact transmission over `window` (default: default_window).
/// Throws NoPeak when the maximum sits on the window boundary.
inline Peak find_peak(const PhysicalParams& p, std::optional<SearchWindow> window = std::nullopt) {
    const SearchWindow w = window.value_or(default_window(p));
    const double estimate = width_approx(p);
    const double step = estimate > 0.0 ? estimate / 8 : (w.hi - w.lo) / static_cast<double>(detail::min_scan_points);
    return detail::scan_and_polish(p, w, step);
}

/// Full width at half maximum of the exact curve around `peak`.
/// Throws BracketFailure when a half-level crossing is not found within
/// Omega_N / 2 of the peak.
inline double fwhm(const PhysicalParams& p, const Peak& peak) {
    const double half = peak.height / 2;
    const double limit = p.Omega_N / 2;
    const double start = std::max(width_approx(p) / 4, 1e-9 * p.Omega_N);

    const auto crossing = [&](double dir) {
        double inner = 0.0, outer = start;
        while (transmission_exact(p, peak.position + dir * outer) >= half) {
            if (outer >= limit) throw Error(ErrorCode::BracketFailure, "half level not crossed within Omega_N/2");
            inner = outer;
            outer = std::min(2 * outer, limit);
        }
        while (outer - inner > 1e-8 * outer) {
            const double mid = 0.5 * (inner + outer);
            if (mid <= inner || mid >= outer) break;
            (transmission_exact(p, peak.position + dir * mid) >= half ? inner : outer) = mid;
        }
        return 0.5 * (inner + outer);
    };
    return crossing(+1.0) + crossing(-1.0);
}

/// Location of the transmission maximum near the eigenmode at `guess`.
inline double locate_local_peak(const PhysicalParams& p, double guess, double width) {
    const double reach = 2.0 * std::max(width, p.kappa);
    return detail::scan_and_polish(p, {guess - reach, guess + reach}, reach / 400).position;
}

/// Maxima of the two vacuum-Rabi peaks, seeded by the two non-dark
/// eigenmodes with the most cavity content and returned in increasing order.
inline std::pair<double, double> rabi_peaks(const PhysicalParams& p) {
    const auto d = decompose(p);
    const auto bright = modes_by_cavity_weight(d);
    double x = locate_local_peak(p, d.peak_position(bright[0]), d.linewidth(bright[0]));
    double y = locate_local_peak(p, d.peak_position(bright[1]), d.linewidth(bright[1]));
    if (x > y) std::swap(x, y);
    return {x, y};
}

struct PeakReport {
    double position = 0.0;
    double height = 0.0;
    double fwhm = 0.0;
    std::pair<double, double> rabi_peaks{};
    SearchWindow search_window;
    std::size_t scan_points = 0;
    std::uintmax_t polish_iterations = 0;
    double tolerance = 0.0;
    double width_approx = 0.0;
    double height_approx = 0.0;
};

inline PeakReport analyze_peak(const PhysicalParams& p, std::optional<SearchWindow> window = std::nullopt) {
    const Peak peak = find_peak(p, window);
    PeakReport r;
    r.position = peak.position;
    r.height = peak.height;
    r.fwhm = fwhm(p, peak);
    r.rabi_peaks = rabi_peaks(p);
    r.search_window = peak.window;
    r.scan_points = peak.scan_points;
    r.polish_iterations = peak.polish_iterations;
    r.tolerance = peak.tolerance;
    r.width_approx = width_approx(p);
    r.height_approx = height_approx(p);
    return r;
}

enum class FluctuationChannel { cavity, one_photon, two_photon };

struct PullingCoefficient {
    double value = 0.0;  ///< |d position / d Delta_j|
    double step = 0.0;   ///< base finite-difference step h_j
    int richardson_levels = 1;
};

struct PullingReport {
    PullingCoefficient c_c, c_t, c_r;
    double approx_c_c = 0.0; ///< (Delta_bar / Omega_N)^2 eta
    double approx_c_t = 0.0;
    double approx_c_r = 0.0; ///< 1 - eta
    double base_position = 0.0;
    double base_fwhm = 0.0;
};

namespace detail {

inline PhysicalParams with_offset(PhysicalParams p, FluctuationChannel ch, double value) {
    switch (ch) {
    case FluctuationChannel::cavity: p.fluct.Delta_c = value; break;
    case FluctuationChannel::one_photon: p.fluct.Delta_t = value; break;
    case FluctuationChannel::two_photon: p.fluct.Delta_r = value; break;
    }
    return p;
}

inline PullingCoefficient pulling_coefficient(const PhysicalParams& p, FluctuationChannel ch, const Peak& base,
                                              double width, double h) {
    const double step = width / 16;
    const auto position = [&](double offset) {
        // The peak moves by at most |offset|; search a narrow window around it.
        const double reach = 2 * std::abs(offset) + 4 * width;
        return scan_and_polish(with_offset(p, ch, offset), {base.position - reach, base.position + reach}, step)
            .position;
    };
    const auto central = [&](double s) { return (position(s) - position(-s)) / (2 * s); };

    PullingCoefficient c;
    c.step = h;
    const double d1 = central(h), d2 = central(h / 2);
    double estimate = (4 * d2 - d1) / 3;
    if (std::abs(estimate - d2) > 0.01 * std::abs(estimate) && std::abs(estimate) > 1e-9) {
        const double d3 = central(h / 4);
        const double finer = (4 * d3 - d2) / 3;
        estimate = (16 * finer - estimate) / 15;
        c.richardson_levels = 2;
    }
    c.value = std::abs(estimate);
    return c;
}

} // namespace detail

/// Central-difference pulling coefficients at zero fluctuations with step
/// h = max(W/20, 2 pi * 1 Hz) and Richardson extrapolation.
inline PullingReport pulling(const PhysicalParams& params) {
    PhysicalParams p = params;
    p.fluct = {};
    const Peak base = find_peak(p);
    const double width = fwhm(p, base);
    const double h = std::max(width / 20, two_pi * 1.0);

    PullingReport r;
    r.base_position = base.position;
    r.base_fwhm = width;
    r.c_c = detail::pulling_coefficient(p, FluctuationChannel::cavity, base, width, h);
    r.c_t = detail::pulling_coefficient(p, FluctuationChannel::one_photon, base, width, h);
    r.c_r = detail::pulling_coefficient(p, FluctuationChannel::two_photon, base, width, h);

    const double eta = eta_factor(p.g_alpha, p.g_beta);
    const double ratio = delta_bar(p.zeeman(), p.gamma) / p.Omega_N;
    r.approx_c_c = ratio * ratio * eta;
    r.approx_c_t = 0.0;
    r.approx_c_r = 1.0 - eta;
    return r;
}

} // namespace miot
