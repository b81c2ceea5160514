#pragma once

// Relative transmitted power P_T(delta_p) of the probe: ratio of the
// steady-state transmitted power to the incident power.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "miot/core.hpp"
#include "miot/langevin.hpp"

namespace miot {

/// P_T = (kappa^2 / 4 s^2) |a_x|^2 for a steady-state cavity amplitude.
inline double transmission_from_amplitude(const PhysicalParams& p, complex a_x) noexcept {
    const double ratio = p.kappa / (2.0 * p.drive_amplitude);
    return ratio * ratio * std::norm(a_x);
}

/// P_T through the 5x5 steady-state solve. Valid for any fluctuation set.
inline double transmission_steady(const PhysicalParams& p, double delta_p) {
    return transmission_from_amplitude(p, steady_state(build_system(p, delta_p)).a_x);
}

namespace detail {

// Closed-form cavity response a_x / (-i s) for zero fluctuations, with all
// rates measured in units of Omega_N. Returns false if the expression is
// degenerate (0/0) at this point.
inline bool closed_form_ratio(const PhysicalParams& p, double delta_p, complex& out) noexcept {
    const double scale = p.Omega_N;
    const complex i{0.0, 1.0};
    const double d = delta_p / scale;
    const double kappa = p.kappa / scale;
    const double gamma = p.gamma / scale;
    const double Delta = p.zeeman() / scale;
    const double Omega = 1.0;

    const complex dg = d - i * (gamma / 2);
    const complex dk = d - i * (kappa / 2);
    complex numerator, denominator;
    if (p.raman_off()) {
        // Raman modes decouple: three-mode elimination of a_x, B_x, B_y.
        numerator = dg * dg - Delta * Delta / 4;
        denominator = dk * numerator - (Omega * Omega / 4) * dg;
    } else {
        const double Gamma = p.Gamma_S / scale;
        const double g_sq = raman_strength_sq(p.g_alpha, p.g_beta) / (scale * scale);
        const double eta = eta_factor(p.g_alpha, p.g_beta);
        const complex R = eta - 4.0 * d * (d - i * (Gamma / 2)) / g_sq;
        const complex F = d * (R + 1.0 - eta) - i * (gamma / 2) * R;
        numerator = dg * F - (Delta * Delta / 4) * R;
        denominator = dk * numerator - (Omega * Omega / 4) * F;
    }
    if (denominator == complex{}) return false;
    out = numerator / denominator;
    return std::isfinite(out.real()) && std::isfinite(out.imag());
}

} // namespace detail

/// Exact P_T. Uses the closed-form elimination when all fluctuations vanish
/// and falls back to the linear solve otherwise (or at 0/0 points).
inline double transmission_exact(const PhysicalParams& p, double delta_p) {
    if (p.fluct.is_zero()) {
        complex ratio;
        if (detail::closed_form_ratio(p, delta_p, ratio)) {
            const double kappa = p.kappa / p.Omega_N;
            return kappa * kappa / 4 * std::norm(ratio);
        }
    }
    return transmission_steady(p, delta_p);
}

/// Single Lorentzian approximation of the MIOT peak, accurate for
/// Omega_N >> Delta >> {gamma, kappa}.
inline double transmission_approx(const PhysicalParams& p, double delta_p) noexcept {
    const double eta = eta_factor(p.g_alpha, p.g_beta);
    const double db = delta_bar(p.zeeman(), p.gamma);
    const double mix = db * db / (p.Omega_N * p.Omega_N);
    const complex i{0.0, 1.0};
    const complex value = (eta * mix) / (delta_p - i * (0.5 * eta * (p.gamma + p.kappa * mix)));
    return p.kappa * p.kappa / 4 * std::norm(value);
}

struct Grid {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 2;
    bool refine = false; ///< refine around maxima until the local step is < FWHM/20

    std::vector<double> points() const {
        std::vector<double> xs(count);
        for (std::size_t k = 0; k < count; ++k) {
            const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
            xs[k] = k + 1 == count ? max : min + (max - min) * t;
        }
        return xs;
    }
};

struct SpectrumPoint {
    double delta_p = 0.0;
    double P_T = 0.0;
};

struct Spectrum {
    std::vector<SpectrumPoint> points;
    Grid grid;
    std::string params_hash;
};

/// Indices of strict interior local maxima with P_T >= min_height.
inline std::vector<std::size_t> local_maxima(const std::vector<SpectrumPoint>& pts, double min_height = 0.0) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
        const double y = pts[k].P_T;
        if (y > pts[k - 1].P_T && y >= pts[k + 1].P_T && y >= min_height) out.push_back(k);
    }
    return out;
}

namespace detail {

// Half-maximum width of the sampled peak at index k, linearly interpolated.
// Falls back to the sampled extent when the half level is not crossed.
inline double sampled_fwhm(const std::vector<SpectrumPoint>& pts, std::size_t k) {
    const double half = pts[k].P_T / 2;
    double left = pts.front().delta_p, right = pts.back().delta_p;
    for (std::size_t j = k; j-- > 0;) {
        if (pts[j].P_T <= half) {
            const double t = (half - pts[j].P_T) / (pts[j + 1].P_T - pts[j].P_T);
            left = pts[j].delta_p + t * (pts[j + 1].delta_p - pts[j].delta_p);
            break;
        }
    }
    for (std::size_t j = k + 1; j < pts.size(); ++j) {
        if (pts[j].P_T <= half) {
            const double t = (pts[j - 1].P_T - half) / (pts[j - 1].P_T - pts[j].P_T);
            right = pts[j - 1].delta_p + t * (pts[j].delta_p - pts[j - 1].delta_p);
            break;
        }
    }
    return right - left;
}

} // namespace detail

inline constexpr std::size_t max_refined_points = 1'000'000;

inline Spectrum sample(const PhysicalParams& p, const Grid& grid) {
    if (grid.count < 2 || !(grid.max > grid.min)) throw Error(ErrorCode::InvalidGrid, "need count >= 2 and max > min");
    Spectrum s;
    s.grid = grid;
    s.params_hash = params_fingerprint(p);
    for (double x : grid.points()) s.points.push_back({x, transmission_exact(p, x)});
    if (!grid.refine) return s;

    // Halve every interval within one estimated FWHM of each maximum until
    // the step next to the maximum drops below FWHM/20.
    for (int round = 0; round < 64 && s.points.size() < max_refined_points; ++round) {
        auto& pts = s.points;
        std::vector<bool> split(pts.size(), false);
        bool any = false;
        for (std::size_t k : local_maxima(pts)) {
            const double w = detail::sampled_fwhm(pts, k);
            const double step = std::max(pts[k].delta_p - pts[k - 1].delta_p, pts[k + 1].delta_p - pts[k].delta_p);
            if (step < w / 20) continue;
            for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
                if (pts[j + 1].delta_p >= pts[k].delta_p - w && pts[j].delta_p <= pts[k].delta_p + w) {
                    split[j] = true;
                    any = true;
                }
            }
        }
        if (!any) break;
        std::vector<SpectrumPoint> next;
        next.reserve(pts.size() * 2);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            next.push_back(pts[j]);
            if (j + 1 < pts.size() && split[j]) {
                const double mid = 0.5 * (pts[j].delta_p + pts[j + 1].delta_p);
                if (mid > pts[j].delta_p && mid < pts[j + 1].delta_p) next.push_back({mid, transmission_exact(p, mid)});
            }
        }
        pts.swap(next);
    }
    return s;
}

} // namespace miot
