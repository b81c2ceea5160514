#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include "miot/error.hpp"

namespace miot {

using complex = std::complex<double>;

// All frequencies below are angular frequencies in rad/s.

/// Deterministic frequency offsets of the cavity and the two Raman beams.
struct FluctuationSet {
    double Delta_c = 0.0; ///< cavity frequency offset
    double Delta_t = 0.0; ///< total (one-photon) Raman detuning
    double Delta_r = 0.0; ///< Raman frequency-difference (two-photon) detuning

    bool is_zero() const noexcept { return Delta_c == 0.0 && Delta_t == 0.0 && Delta_r == 0.0; }
};

struct DerivedQuantities {
    double eta = 1.0;       ///< |g_beta|^2 / (|g_alpha|^2 + |g_beta|^2), 1 when both vanish
    double Delta_bar = 0.0; ///< sqrt(Delta^2 + gamma^2)
};

struct PhysicalParams {
    double omega_A = 0.0;  ///< 1S0 <-> 3P1 frequency, only a reference
    double Omega_N = 0.0;  ///< collective Rabi frequency sqrt(N) * Omega
    std::int64_t N_atoms = 1;
    std::optional<double> Delta; ///< Zeeman splitting 2 mu B
    std::optional<double> mu;    ///< magnetic moment, rad/s per tesla
    std::optional<double> B;     ///< magnetic field, tesla
    double kappa = 0.0;    ///< cavity decay
    double gamma = 0.0;    ///< 3P1 decay
    double Gamma_S = 0.0;  ///< 3S1 decay
    complex g_alpha{};     ///< Raman Rabi frequency 3P1 <-> 3S1
    complex g_beta{};      ///< Raman Rabi frequency 3S1 <-> 3P0
    double drive_amplitude = 1.0;
    FluctuationSet fluct{};

    /// Filled in by validate().
    std::optional<DerivedQuantities> derived;

    double zeeman() const noexcept { return Delta.value_or(0.0); }
    double single_atom_rabi() const { return Omega_N / std::sqrt(static_cast<double>(N_atoms)); }
    bool raman_off() const noexcept { return g_alpha == complex{} && g_beta == complex{}; }
};

inline double raman_strength_sq(complex g_alpha, complex g_beta) noexcept {
    return std::norm(g_alpha) + std::norm(g_beta);
}

inline double eta_factor(complex g_alpha, complex g_beta) noexcept {
    const double total = raman_strength_sq(g_alpha, g_beta);
    if (total == 0.0) return 1.0;
    return std::norm(g_beta) / total;
}

inline double delta_bar(double Delta, double gamma) noexcept { return std::hypot(Delta, gamma); }

inline DerivedQuantities derived(const PhysicalParams& p) noexcept {
    return {eta_factor(p.g_alpha, p.g_beta), delta_bar(p.zeeman(), p.gamma)};
}

/// Checks the invariants of the model and returns a normalized copy
/// with Delta resolved (from mu*B if needed) and derived quantities set.
inline PhysicalParams validate(PhysicalParams p) {
    if (!(p.kappa > 0.0)) throw Error(ErrorCode::NonPositiveRate, "kappa");
    if (!(p.Omega_N > 0.0)) throw Error(ErrorCode::NonPositiveRate, "Omega_N");
    if (!(p.drive_amplitude > 0.0)) throw Error(ErrorCode::NonPositiveRate, "drive_amplitude");
    if (!(p.gamma >= 0.0)) throw Error(ErrorCode::NegativeRate, "gamma");
    if (!(p.Gamma_S >= 0.0)) throw Error(ErrorCode::NegativeRate, "Gamma_S");
    if (p.N_atoms < 1) throw Error(ErrorCode::InvalidAtomCount, "N_atoms must be >= 1");
    if (!std::isfinite(p.omega_A) || !std::isfinite(p.kappa) || !std::isfinite(p.Omega_N) ||
        !std::isfinite(p.gamma) || !std::isfinite(p.Gamma_S) || !std::isfinite(p.drive_amplitude))
        throw Error(ErrorCode::NonPositiveRate, "non-finite rate");

    if (p.mu && p.B) {
        const double from_field = 2.0 * *p.mu * *p.B;
        if (p.Delta) {
            const double scale = std::max(std::abs(*p.Delta), std::abs(from_field));
            if (std::abs(*p.Delta - from_field) > 1e-12 * scale)
                throw Error(ErrorCode::InconsistentZeeman, "Delta differs from 2*mu*B");
        } else {
            p.Delta = from_field;
        }
    }
    if (!p.Delta) p.Delta = 0.0;
    if (!std::isfinite(*p.Delta)) throw Error(ErrorCode::InconsistentZeeman, "Delta is not finite");

    const auto guard = [&](double value, const char* name) {
        if (!(std::abs(value) < p.Omega_N)) throw Error(ErrorCode::FluctuationTooLarge, name);
    };
    guard(p.fluct.Delta_c, "Delta_c");
    guard(p.fluct.Delta_t, "Delta_t");
    guard(p.fluct.Delta_r, "Delta_r");

    p.derived = derived(p);
    return p;
}

/// Opaque 16-hex-digit token identifying a parameter set (FNV-1a over the
/// bit patterns of every field).
inline std::string params_fingerprint(const PhysicalParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    const auto mix_d = [&](double v) { mix(std::bit_cast<std::uint64_t>(v)); };
    const auto mix_opt = [&](const std::optional<double>& v) {
        mix(v.has_value() ? 1U : 0U);
        mix_d(v.value_or(0.0));
    };
    mix_d(p.omega_A);
    mix_d(p.Omega_N);
    mix(static_cast<std::uint64_t>(p.N_atoms));
    mix_opt(p.Delta);
    mix_opt(p.mu);
    mix_opt(p.B);
    mix_d(p.kappa);
    mix_d(p.gamma);
    mix_d(p.Gamma_S);
    mix_d(p.g_alpha.real());
    mix_d(p.g_alpha.imag());
    mix_d(p.g_beta.real());
    mix_d(p.g_beta.imag());
    mix_d(p.drive_amplitude);
    mix_d(p.fluct.Delta_c);
    mix_d(p.fluct.Delta_t);
    mix_d(p.fluct.Delta_r);

    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xfU];
    return out;
}

} // namespace miot
