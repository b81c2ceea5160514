#pragma once

// Linear Heisenberg-Langevin equations for the expectation values of the
// five bosonic modes (cavity a_x, collective 3P1 modes B_x/B_y, collective
// 3S1 mode C_S and 3P0 mode C_P) in the frame rotating at the probe
// frequency:
//
//     i dx/dt = M x + d,     steady state  M x = -d.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "miot/core.hpp"
#include "miot/linalg.hpp"

namespace miot {

inline constexpr std::size_t mode_count = 5;

enum class Mode : std::size_t { a_x = 0, B_x = 1, B_y = 2, C_S = 3, C_P = 4 };

constexpr std::size_t idx(Mode m) noexcept { return static_cast<std::size_t>(m); }

using ModeMatrix = linalg::Matrix<complex, mode_count>;
using ModeVector = linalg::Vector<complex, mode_count>;

struct ModeAmplitudes {
    complex a_x{}, B_x{}, B_y{}, C_S{}, C_P{};

    ModeVector to_vector() const noexcept { return {a_x, B_x, B_y, C_S, C_P}; }
    static ModeAmplitudes from_vector(const ModeVector& v) noexcept { return {v[0], v[1], v[2], v[3], v[4]}; }

    /// Summed population of the four atomic modes.
    double atomic_excitation() const noexcept {
        return std::norm(B_x) + std::norm(B_y) + std::norm(C_S) + std::norm(C_P);
    }
};

struct LangevinSystem {
    ModeMatrix matrix{};
    ModeVector drive{};
    double delta_p = 0.0;
};

/// Coefficient matrix without the probe detuning, i.e. M - delta_p * I.
inline ModeMatrix drive_free_matrix(const PhysicalParams& p) {
    ModeMatrix m;
    const auto& f = p.fluct;
    const double Delta = p.zeeman();
    const complex i{0.0, 1.0};
    const auto a = idx(Mode::a_x), bx = idx(Mode::B_x), by = idx(Mode::B_y), cs = idx(Mode::C_S),
               cp = idx(Mode::C_P);

    m(a, a) = complex{f.Delta_c, -p.kappa / 2};
    m(bx, bx) = complex{0.0, -p.gamma / 2};
    m(by, by) = complex{0.0, -p.gamma / 2};
    m(cs, cs) = complex{-(f.Delta_t + f.Delta_r) / 2, -p.Gamma_S / 2};
    m(cp, cp) = complex{-f.Delta_r, 0.0};

    m(a, bx) = p.Omega_N / 2;
    m(bx, a) = p.Omega_N / 2;
    m(bx, by) = -i * (Delta / 2);
    m(by, bx) = i * (Delta / 2);
    m(by, cs) = std::conj(p.g_alpha) / 2.0;
    m(cs, by) = p.g_alpha / 2.0;
    m(cs, cp) = p.g_beta / 2.0;
    m(cp, cs) = std::conj(p.g_beta) / 2.0;
    return m;
}

inline LangevinSystem build_system(const PhysicalParams& p, double delta_p) {
    LangevinSystem sys;
    sys.matrix = drive_free_matrix(p);
    for (std::size_t k = 0; k < mode_count; ++k) sys.matrix(k, k) += delta_p;
    sys.drive[idx(Mode::a_x)] = complex{0.0, p.drive_amplitude};
    sys.delta_p = delta_p;
    return sys;
}

/// Modes reachable from the cavity mode through nonzero couplings.
/// Modes outside this set never see the probe.
inline std::array<bool, mode_count> probe_coupled_modes(const ModeMatrix& m) noexcept {
    std::array<bool, mode_count> seen{};
    std::array<std::size_t, mode_count> stack{};
    std::size_t top = 0;
    seen[idx(Mode::a_x)] = true;
    stack[top++] = idx(Mode::a_x);
    while (top > 0) {
        const std::size_t u = stack[--top];
        for (std::size_t v = 0; v < mode_count; ++v) {
            if (seen[v] || v == u) continue;
            if (m(u, v) != complex{} || m(v, u) != complex{}) {
                seen[v] = true;
                stack[top++] = v;
            }
        }
    }
    return seen;
}

namespace detail {

// Replaces rows/columns of probe-decoupled modes by identity so that their
// amplitude is pinned to zero; decoupled undamped modes would otherwise make
// M singular without affecting a_x.
inline ModeMatrix restrict_to_coupled(const ModeMatrix& m, const std::array<bool, mode_count>& coupled) {
    ModeMatrix r = m;
    for (std::size_t k = 0; k < mode_count; ++k) {
        if (coupled[k]) continue;
        for (std::size_t j = 0; j < mode_count; ++j) {
            r(k, j) = 0.0;
            r(j, k) = 0.0;
        }
        r(k, k) = 1.0;
    }
    return r;
}

inline void check_residual(const LangevinSystem& sys, const ModeVector& x) {
    auto r = linalg::multiply(sys.matrix, x);
    for (std::size_t k = 0; k < mode_count; ++k) r[k] += sys.drive[k];
    const double bound =
        1e-12 * (linalg::frobenius_norm(sys.matrix) * linalg::norm(x) + linalg::norm(sys.drive));
    if (!(linalg::norm(r) <= bound)) throw Error(ErrorCode::SingularSystem, "steady-state residual too large");
}

} // namespace detail

/// Steady state together with its derivative with respect to delta_p.
struct SteadyStateSlope {
    ModeAmplitudes value;
    ModeAmplitudes d_delta_p;
};

inline SteadyStateSlope steady_state_with_slope(const LangevinSystem& sys) {
    const auto coupled = probe_coupled_modes(sys.matrix);
    const linalg::LuFactorization<complex, mode_count> lu(detail::restrict_to_coupled(sys.matrix, coupled));
    if (lu.singular()) throw Error(ErrorCode::SingularSystem, "rank-deficient Langevin matrix");

    ModeVector rhs;
    for (std::size_t k = 0; k < mode_count; ++k) rhs[k] = coupled[k] ? -sys.drive[k] : complex{};
    const ModeVector x = lu.solve(rhs);
    detail::check_residual(sys, x);

    // d/d(delta_p) of M x = -d with dM/d(delta_p) = I gives M x' = -x.
    ModeVector neg_x;
    for (std::size_t k = 0; k < mode_count; ++k) neg_x[k] = -x[k];
    return {ModeAmplitudes::from_vector(x), ModeAmplitudes::from_vector(lu.solve(neg_x))};
}

inline ModeAmplitudes steady_state(const LangevinSystem& sys) { return steady_state_with_slope(sys).value; }

/// Fraction of atoms excited; above `low_excitation_limit` the bosonic
/// (Holstein-Primakoff) treatment is questionable.
inline double excitation_fraction(const ModeAmplitudes& x, std::int64_t N_atoms) noexcept {
    return x.atomic_excitation() / static_cast<double>(N_atoms);
}

inline constexpr double low_excitation_limit = 0.01;

inline bool low_excitation_violated(const ModeAmplitudes& x, std::int64_t N_atoms) noexcept {
    return excitation_fraction(x, N_atoms) > low_excitation_limit;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<ModeAmplitudes> states;
    ModeAmplitudes final_state;
    std::size_t steps = 0;
};

/// Fixed-step RK4 integration of dx/dt = -i (M x + d) from x0 to t_final.
/// Requires dt * gershgorin(M) < 0.1. At most `max_samples` evenly spaced
/// states are retained; the final state is always among them.
inline Trajectory integrate(const LangevinSystem& sys, const ModeAmplitudes& x0, double t_final, double dt,
                           std::size_t max_samples = 1001) {
    if (!(dt > 0.0) || !(t_final >= 0.0)) throw Error(ErrorCode::StepTooLarge, "dt must be positive");
    const double radius = linalg::gershgorin_bound(sys.matrix);
    if (!(dt * radius < 0.1)) throw Error(ErrorCode::StepTooLarge, "dt * spectral bound >= 0.1");

    const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt));
    const double h = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);
    // Sample j of `slots` is taken at step ceil(j * steps / slots).
    const std::size_t slots = std::max<std::size_t>(1, max_samples - 1);
    const auto target = [&](std::size_t j) { return (j * steps + slots - 1) / slots; };
    std::size_t next = 1;

    const complex minus_i{0.0, -1.0};
    ModeMatrix a;
    ModeVector b;
    for (std::size_t i = 0; i < mode_count; ++i) {
        b[i] = minus_i * sys.drive[i];
        for (std::size_t j = 0; j < mode_count; ++j) a(i, j) = minus_i * sys.matrix(i, j);
    }
    const auto rhs = [&](const ModeVector& x) {
        ModeVector y = linalg::multiply(a, x);
        for (std::size_t i = 0; i < mode_count; ++i) y[i] += b[i];
        return y;
    };

    Trajectory traj;
    traj.steps = steps;
    ModeVector x = x0.to_vector();
    traj.times.push_back(0.0);
    traj.states.push_back(x0);

    ModeVector tmp;
    for (std::size_t n = 1; n <= steps; ++n) {
        const ModeVector k1 = rhs(x);
        for (std::size_t i = 0; i < mode_count; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        const ModeVector k2 = rhs(tmp);
        for (std::size_t i = 0; i < mode_count; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        const ModeVector k3 = rhs(tmp);
        for (std::size_t i = 0; i < mode_count; ++i) tmp[i] = x[i] + h * k3[i];
        const ModeVector k4 = rhs(tmp);
        for (std::size_t i = 0; i < mode_count; ++i) x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        if (next <= slots && n >= target(next)) {
            traj.times.push_back(static_cast<double>(n) * h);
            traj.states.push_back(ModeAmplitudes::from_vector(x));
            while (next <= slots && target(next) <= n) ++next;
        }
    }
    traj.final_state = ModeAmplitudes::from_vector(x);
    return traj;
}

} // namespace miot
