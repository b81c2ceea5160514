#pragma once

// Non-Hermitian single-excitation analysis. The drive-free Langevin matrix
// M - delta_p I plays the role of an effective Hamiltonian: an eigenvalue
// lambda produces a transmission resonance at delta_p = -Re(lambda) with
// full width -2 Im(lambda).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "miot/core.hpp"
#include "miot/langevin.hpp"
#include "miot/linalg.hpp"

namespace miot {

struct ModeDecomposition {
    std::array<complex, mode_count> eigenvalues{};
    std::array<ModeVector, mode_count> right_eigenvectors{};
    /// Weight of each eigenvector on the modes reachable from the cavity.
    std::array<double, mode_count> probe_weight{};
    std::size_t dark_index = 0;
    double matrix_norm = 0.0;
    int iterations = 0;

    double peak_position(std::size_t k) const noexcept { return -eigenvalues[k].real(); }
    double linewidth(std::size_t k) const noexcept { return -2.0 * eigenvalues[k].imag(); }
    bool probe_visible(std::size_t k) const noexcept { return probe_weight[k] > 0.5; }
};

/// Eigen-decomposition of the drive-free matrix, eigenvalues sorted by
/// (Re, Im). The dark index is the probe-visible eigenvalue with the
/// smallest |Im|; near-ties (within 1e-9 |M|) go to the smaller |Re|.
inline ModeDecomposition decompose(const PhysicalParams& p) {
    const ModeMatrix m = drive_free_matrix(p);
    const auto eig = linalg::eigen_decompose(m);
    if (!eig.converged) throw Error(ErrorCode::ConvergenceFailure, "QR iteration budget exhausted");

    ModeDecomposition out;
    out.matrix_norm = linalg::frobenius_norm(m);
    out.iterations = eig.iterations;

    std::array<std::size_t, mode_count> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const complex la = eig.values[a], lb = eig.values[b];
        return la.real() != lb.real() ? la.real() < lb.real() : la.imag() < lb.imag();
    });

    const auto coupled = probe_coupled_modes(m);
    for (std::size_t k = 0; k < mode_count; ++k) {
        out.eigenvalues[k] = eig.values[order[k]];
        out.right_eigenvectors[k] = eig.vectors[order[k]];

        auto r = linalg::multiply(m, out.right_eigenvectors[k]);
        for (std::size_t i = 0; i < mode_count; ++i) r[i] -= out.eigenvalues[k] * out.right_eigenvectors[k][i];
        if (!(linalg::norm(r) <= 1e-10 * out.matrix_norm))
            throw Error(ErrorCode::ConvergenceFailure, "eigenpair residual above tolerance");

        double w = 0.0;
        for (std::size_t i = 0; i < mode_count; ++i)
            if (coupled[i]) w += std::norm(out.right_eigenvectors[k][i]);
        out.probe_weight[k] = w;
    }

    const double tie = 1e-9 * out.matrix_norm;
    bool found = false;
    for (std::size_t k = 0; k < mode_count; ++k) {
        if (!out.probe_visible(k)) continue;
        if (!found) {
            out.dark_index = k;
            found = true;
            continue;
        }
        const complex best = out.eigenvalues[out.dark_index], cand = out.eigenvalues[k];
        const double dim = std::abs(cand.imag()) - std::abs(best.imag());
        if (dim < -tie || (std::abs(dim) <= tie && std::abs(cand.real()) < std::abs(best.real())))
            out.dark_index = k;
    }
    return out;
}

/// Non-dark eigenmodes ordered by decreasing cavity content |v_a|^2 / |v|^2.
/// The first two are the atom-photon polaritons of the vacuum-Rabi doublet;
/// ranking by damping instead would pick the Raman-dressed pair once
/// |g_alpha| >> Omega_N.
inline std::vector<std::size_t> modes_by_cavity_weight(const ModeDecomposition& d) {
    std::array<double, mode_count> weight{};
    for (std::size_t k = 0; k < mode_count; ++k) {
        const auto& v = d.right_eigenvectors[k];
        double norm = 0.0;
        for (std::size_t j = 0; j < mode_count; ++j) norm += std::norm(v[j]);
        weight[k] = norm > 0.0 ? std::norm(v[idx(Mode::a_x)]) / norm : 0.0;
    }
    std::vector<std::size_t> idxs;
    for (std::size_t k = 0; k < mode_count; ++k)
        if (k != d.dark_index) idxs.push_back(k);
    std::stable_sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    return idxs;
}

/// Lambda-system dark state over (|e_y>, |P>).
inline std::array<complex, 2> dark_state_vector(complex g_alpha, complex g_beta) {
    const double total = raman_strength_sq(g_alpha, g_beta);
    if (total == 0.0) throw Error(ErrorCode::ZeroRaman, "g_alpha and g_beta both vanish");
    const double n = std::sqrt(total);
    return {g_beta / n, -g_alpha / n};
}

/// First-order (in Delta / Omega_N) dressed dark state
///     |D>|0> + i Delta g_beta / (Omega_N sqrt(|g_alpha|^2+|g_beta|^2)) |g>|1>
/// and its population-weighted decay estimates.
struct PerturbativeDarkState {
    complex amplitude_D{1.0, 0.0};
    complex amplitude_g1{};
    double energy = 0.0;
    double decay_estimate = 0.0;            ///< eta [gamma + (Delta/Omega_N)^2 kappa]
    double decay_estimate_weak_field = 0.0; ///< eta gamma, the Delta/Omega_N -> 0 limit
    bool outside_perturbative_regime = false; ///< Delta / Omega_N > 0.3

    /// Unit-normalized state in Langevin mode order (a_x, B_x, B_y, C_S, C_P).
    ModeVector mode_vector(const PhysicalParams& p) const {
        const double total = raman_strength_sq(p.g_alpha, p.g_beta);
        // Without Raman beams the dark state is |e_y> itself.
        const std::array<complex, 2> d = total == 0.0 ? std::array<complex, 2>{complex{1.0}, complex{}}
                                                      : dark_state_vector(p.g_alpha, p.g_beta);
        ModeVector v{amplitude_g1, {}, amplitude_D * d[0], {}, amplitude_D * d[1]};
        const double n = linalg::norm(v);
        for (auto& e : v) e /= n;
        return v;
    }
};

inline PerturbativeDarkState perturbative_dark(const PhysicalParams& p) {
    PerturbativeDarkState s;
    const double Delta = p.zeeman();
    const double total = raman_strength_sq(p.g_alpha, p.g_beta);
    const complex weight = total == 0.0 ? complex{1.0} : p.g_beta / std::sqrt(total);
    const double eta = eta_factor(p.g_alpha, p.g_beta);
    const double ratio = Delta / p.Omega_N;

    s.amplitude_g1 = complex{0.0, 1.0} * ratio * weight;
    s.energy = p.omega_A;
    s.decay_estimate = eta * (p.gamma + ratio * ratio * p.kappa);
    s.decay_estimate_weak_field = eta * p.gamma;
    s.outside_perturbative_regime = std::abs(ratio) > 0.3;
    return s;
}

/// |<a|b>|^2 for unit vectors.
inline double overlap_sq(const ModeVector& a, const ModeVector& b) noexcept {
    complex dot{};
    for (std::size_t i = 0; i < mode_count; ++i) dot += std::conj(a[i]) * b[i];
    return std::norm(dot);
}

} // namespace miot
