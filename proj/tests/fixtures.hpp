#pragma once

// Parameter sets shared by the test suites, written out literally so the
// tests do not depend on the JSON loader.

#include <cmath>
#include <numbers>
#include <random>

#include "miot/core.hpp"

namespace fixtures {

inline constexpr double tau = 2 * std::numbers::pi;

inline miot::PhysicalParams reference(double g_alpha_mhz, double g_beta_mhz) {
    miot::PhysicalParams p;
    p.Omega_N = tau * 5e6;
    p.Delta = tau * 1e6;
    p.kappa = tau * 150e3;
    p.gamma = tau * 7.5e3;
    p.Gamma_S = tau * 5.3e6;
    p.g_alpha = tau * 1e6 * g_alpha_mhz;
    p.g_beta = tau * 1e6 * g_beta_mhz;
    p.N_atoms = 100000;
    return miot::validate(p);
}

inline miot::PhysicalParams case_a() { return reference(0, 0); }
inline miot::PhysicalParams case_b() { return reference(10, 2); }
inline miot::PhysicalParams case_c() { return reference(40, 2); }

/// Log-uniform draw in [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

/// Random physical parameter set spanning several decades of every rate.
inline miot::PhysicalParams random_params(std::mt19937_64& rng, bool with_fluctuations) {
    std::uniform_real_distribution<double> phase(0.0, tau);
    std::bernoulli_distribution coin(0.5);
    miot::PhysicalParams p;
    p.Omega_N = log_uniform(rng, tau * 1e4, tau * 1e8);
    p.Delta = (coin(rng) ? 1.0 : -1.0) * log_uniform(rng, tau * 1e2, tau * 1e8);
    p.kappa = log_uniform(rng, tau * 1e2, tau * 1e7);
    p.gamma = coin(rng) ? 0.0 : log_uniform(rng, tau * 1, tau * 1e6);
    p.Gamma_S = coin(rng) ? 0.0 : log_uniform(rng, tau * 1e2, tau * 1e8);
    if (coin(rng)) {
        p.g_alpha = std::polar(log_uniform(rng, tau * 1e3, tau * 1e8), phase(rng));
        p.g_beta = std::polar(log_uniform(rng, tau * 1e3, tau * 1e8), phase(rng));
    }
    p.drive_amplitude = log_uniform(rng, 1e-3, 1e3);
    if (with_fluctuations) {
        std::uniform_real_distribution<double> frac(-0.5, 0.5);
        p.fluct = {frac(rng) * p.Omega_N, frac(rng) * p.Omega_N, frac(rng) * p.Omega_N};
    }
    return miot::validate(p);
}

} // namespace fixtures
