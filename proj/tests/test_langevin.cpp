#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "miot/langevin.hpp"
#include "miot/spectrum.hpp"

using namespace miot;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using fixtures::tau;

namespace {

constexpr auto a_x = idx(Mode::a_x), B_x = idx(Mode::B_x), B_y = idx(Mode::B_y), C_S = idx(Mode::C_S),
               C_P = idx(Mode::C_P);
const complex I{0.0, 1.0};

PhysicalParams bare(double Omega_N, double Delta, double kappa, double gamma) {
    PhysicalParams p;
    p.Omega_N = Omega_N;
    p.Delta = Delta;
    p.kappa = kappa;
    p.gamma = gamma;
    return p;  // left unvalidated on purpose: Omega_N = 0 is a useful limit
}

double drive_free_norm_rate(const ModeMatrix& m, const ModeVector& x) {
    // d|x|^2/dt for dx/dt = -i M x.
    const auto mx = linalg::multiply(m, x);
    complex s{};
    for (std::size_t k = 0; k < mode_count; ++k) s += std::conj(x[k]) * (-I * mx[k]);
    return 2.0 * s.real();
}

} // namespace

TEST_CASE("coefficient matrix entries") {
    auto p = fixtures::reference(10, 2);
    p.g_alpha = complex{3.0, 4.0};
    p.g_beta = complex{-1.0, 2.0};
    p.fluct = {5.0, 7.0, 11.0};
    const double dp = 13.0;
    const auto sys = build_system(p, dp);
    const auto& m = sys.matrix;

    CHECK(m(a_x, a_x) == complex(dp + 5.0, -p.kappa / 2));
    CHECK(m(B_x, B_x) == complex(dp, -p.gamma / 2));
    CHECK(m(B_y, B_y) == complex(dp, -p.gamma / 2));
    CHECK(m(C_S, C_S) == complex(dp - (7.0 + 11.0) / 2, -p.Gamma_S / 2));
    CHECK(m(C_P, C_P) == complex(dp - 11.0, 0.0));

    CHECK(m(a_x, B_x) == p.Omega_N / 2);
    CHECK(m(B_x, a_x) == p.Omega_N / 2);
    CHECK(m(B_x, B_y) == -I * (*p.Delta / 2));
    CHECK(m(B_y, B_x) == I * (*p.Delta / 2));
    CHECK(m(B_y, C_S) == std::conj(p.g_alpha) / 2.0);
    CHECK(m(C_S, B_y) == p.g_alpha / 2.0);
    CHECK(m(C_S, C_P) == p.g_beta / 2.0);
    CHECK(m(C_P, C_S) == std::conj(p.g_beta) / 2.0);

    int nonzero_off = 0;
    for (std::size_t i = 0; i < mode_count; ++i)
        for (std::size_t j = 0; j < mode_count; ++j)
            if (i != j && m(i, j) != complex{}) ++nonzero_off;
    CHECK(nonzero_off == 8);

    CHECK(sys.drive[a_x] == I * p.drive_amplitude);
    for (std::size_t k = 1; k < mode_count; ++k) CHECK(sys.drive[k] == complex{});
    CHECK(sys.delta_p == dp);
}

TEST_CASE("Zeeman coupling value") {
    const auto m = drive_free_matrix(fixtures::case_a());
    CHECK_THAT(m(B_x, B_y).imag(), WithinRel(-tau * 0.5e6, 1e-15));
    CHECK(m(B_x, B_y).real() == 0.0);
}

TEST_CASE("two-photon fluctuation shifts C_P and half-shifts C_S") {
    auto p = fixtures::case_b();
    p.fluct.Delta_r = tau * 1e3;
    const auto m0 = drive_free_matrix(fixtures::case_b()), m1 = drive_free_matrix(p);
    CHECK_THAT((m1(C_P, C_P) - m0(C_P, C_P)).real(), WithinRel(-tau * 1e3, 1e-15));
    CHECK_THAT((m1(C_S, C_S) - m0(C_S, C_S)).real(), WithinRel(-tau * 0.5e3, 1e-15));
}

TEST_CASE("each fluctuation touches only its own entries") {
    const auto base = drive_free_matrix(fixtures::case_b());
    const auto changed = [&](FluctuationSet f) {
        auto p = fixtures::case_b();
        p.fluct = f;
        const auto m = drive_free_matrix(p);
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < mode_count; ++i)
            for (std::size_t j = 0; j < mode_count; ++j)
                if (m(i, j) != base(i, j)) out.emplace_back(i, j);
        return out;
    };
    using V = std::vector<std::pair<std::size_t, std::size_t>>;
    CHECK(changed({1e3, 0, 0}) == V{{a_x, a_x}});
    CHECK(changed({0, 1e3, 0}) == V{{C_S, C_S}});
    CHECK(changed({0, 0, 1e3}) == V{{C_S, C_S}, {C_P, C_P}});
}

TEST_CASE("all couplings off gives a diagonal matrix") {
    const auto m = build_system(bare(0.0, 0.0, 1.0, 1.0), 0.3).matrix;
    for (std::size_t i = 0; i < mode_count; ++i)
        for (std::size_t j = 0; j < mode_count; ++j)
            if (i != j) CHECK(m(i, j) == complex{});
}

TEST_CASE("Hermitian and anti-Hermitian parts at zero fluctuations") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = fixtures::random_params(rng, false);
        const auto m = drive_free_matrix(p);
        const auto mh = linalg::adjoint(m);
        for (std::size_t i = 0; i < mode_count; ++i)
            for (std::size_t j = 0; j < mode_count; ++j) {
                const complex anti = (m(i, j) - mh(i, j)) / 2.0;
                if (i != j) CHECK(anti == complex{});
            }
        CHECK(m(a_x, a_x) == complex(0, -p.kappa / 2));
        CHECK(m(B_x, B_x) == complex(0, -p.gamma / 2));
        CHECK(m(C_S, C_S) == complex(0, -p.Gamma_S / 2));
        CHECK(m(C_P, C_P) == complex{});
    }
}

TEST_CASE("empty cavity on resonance") {
    const auto p = bare(0.0, 0.0, tau * 150e3, tau * 7.5e3);
    const auto x = steady_state(build_system(p, 0.0));
    CHECK_THAT(std::abs(x.a_x), WithinRel(2.0 * p.drive_amplitude / p.kappa, 1e-14));
    CHECK(x.atomic_excitation() == 0.0);
}

TEST_CASE("steady state satisfies M x = -d with small residual") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto p = fixtures::random_params(rng, trial % 2 == 0);
        const auto sys = build_system(p, u(rng) * p.Omega_N);
        const auto x = steady_state(sys).to_vector();
        auto r = linalg::multiply(sys.matrix, x);
        for (std::size_t k = 0; k < mode_count; ++k) r[k] += sys.drive[k];
        CHECK(linalg::norm(r) <=
              1e-12 * (linalg::frobenius_norm(sys.matrix) * linalg::norm(x) + linalg::norm(sys.drive)));
    }
}

TEST_CASE("steady-state P_T agrees with the closed form at the reference point") {
    const auto p = fixtures::case_b();
    const double via_solve = transmission_steady(p, 0.0);
    CHECK_THAT(via_solve, WithinRel(transmission_exact(p, 0.0), 1e-10));
}

TEST_CASE("amplitudes scale linearly with the drive") {
    auto p = fixtures::case_c();
    const auto x1 = steady_state(build_system(p, tau * 123.0));
    p.drive_amplitude = 2.0;
    const auto x2 = steady_state(build_system(p, tau * 123.0));
    CHECK(x2.a_x == 2.0 * x1.a_x);
    CHECK(x2.C_P == 2.0 * x1.C_P);
}

TEST_CASE("rank-deficient system is reported") {
    PhysicalParams p = bare(0.0, 0.0, 0.0, 0.0);
    try {
        steady_state(build_system(p, 0.0));
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularSystem);
    }
}

TEST_CASE("probe-decoupled undamped modes do not make the solve singular") {
    // g_beta only: C_P is coupled; g_alpha only: C_P is isolated and undamped.
    auto p = fixtures::reference(2, 0);
    CHECK_NOTHROW(steady_state(build_system(p, 0.0)));
    const auto coupled = probe_coupled_modes(drive_free_matrix(p));
    CHECK_FALSE(coupled[C_P]);
    CHECK(coupled[C_S]);
}

TEST_CASE("slope of the steady state matches finite differences") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = fixtures::random_params(rng, true);
        const double dp = u(rng) * p.Omega_N;
        const double h = 1e-6 * std::max(p.kappa, std::abs(dp));
        const auto s = steady_state_with_slope(build_system(p, dp));
        const auto plus = steady_state(build_system(p, dp + h)).a_x;
        const auto minus = steady_state(build_system(p, dp - h)).a_x;
        const complex fd = (plus - minus) / (2 * h);
        CHECK(std::abs(fd - s.d_delta_p.a_x) <= 1e-4 * std::abs(s.d_delta_p.a_x) + 1e-9 * std::abs(s.value.a_x) / h);
    }
}

TEST_CASE("integrator leaves the steady state in place") {
    const auto p = fixtures::case_a();
    const auto sys = build_system(p, tau * 2e3);
    const auto xs = steady_state(sys);
    const double dt = 0.05 / linalg::gershgorin_bound(sys.matrix);
    const auto traj = integrate(sys, xs, 2000 * dt, dt, 11);
    CHECK(traj.states.size() == 11);
    CHECK(traj.times.back() == Catch::Approx(2000 * dt));
    const double scale = linalg::norm(xs.to_vector());
    for (const auto& s : traj.states) {
        auto d = s.to_vector();
        for (std::size_t k = 0; k < mode_count; ++k) d[k] -= xs.to_vector()[k];
        CHECK(linalg::norm(d) <= 1e-10 * scale);
    }
}

TEST_CASE("undriven system starting at zero stays at zero") {
    auto sys = build_system(fixtures::case_b(), 0.0);
    sys.drive = {};
    const double dt = 0.05 / linalg::gershgorin_bound(sys.matrix);
    const auto traj = integrate(sys, {}, 100 * dt, dt);
    for (const auto& s : traj.states) CHECK(s.to_vector() == ModeVector{});
}

TEST_CASE("step size guard") {
    const auto sys = build_system(fixtures::case_b(), 0.0);
    const double bound = linalg::gershgorin_bound(sys.matrix);
    try {
        integrate(sys, {}, 1.0, 0.2 / bound);
        FAIL("expected StepTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepTooLarge);
    }
    CHECK_NOTHROW(integrate(sys, {}, 10 * 0.09 / bound, 0.09 / bound));
}

TEST_CASE("lossless undriven evolution conserves the norm") {
    PhysicalParams p = fixtures::case_c();
    p.kappa = 0.0;
    p.gamma = 0.0;
    p.Gamma_S = 0.0;
    auto sys = build_system(p, tau * 3e5);
    sys.drive = {};
    ModeAmplitudes x0{1.0, {0.0, 0.5}, -0.25, {0.1, 0.1}, 0.3};
    const double dt = 0.02 / linalg::gershgorin_bound(sys.matrix);
    const auto traj = integrate(sys, x0, 5000 * dt, dt);
    const double n0 = linalg::norm(x0.to_vector());
    for (const auto& s : traj.states) CHECK_THAT(linalg::norm(s.to_vector()), WithinRel(n0, 1e-8));
}

TEST_CASE("undriven flow is passive for every state") {
    std::mt19937_64 rng(34);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5000; ++trial) {
        const auto p = fixtures::random_params(rng, trial % 2 == 0);
        const auto m = build_system(p, g(rng) * p.Omega_N).matrix;
        ModeVector x;
        for (auto& v : x) v = {g(rng), g(rng)};
        const double rate = drive_free_norm_rate(m, x);
        CHECK(rate <= 1e-12 * linalg::frobenius_norm(m) * std::pow(linalg::norm(x), 2));
    }
}

TEST_CASE("steady state is continuous in the probe detuning") {
    const auto p = fixtures::case_b();
    const double h = tau * 20.0;
    const auto diff = [&](double step) {
        const auto a = steady_state(build_system(p, tau * 100.0)).to_vector();
        const auto b = steady_state(build_system(p, tau * 100.0 + step)).to_vector();
        ModeVector d;
        for (std::size_t k = 0; k < mode_count; ++k) d[k] = a[k] - b[k];
        return linalg::norm(d);
    };
    const double d1 = diff(h), d2 = diff(h / 2), d3 = diff(h / 4);
    CHECK_THAT(d1 / d2, WithinAbs(2.0, 0.05));
    CHECK_THAT(d2 / d3, WithinAbs(2.0, 0.05));
}

TEST_CASE("excited fraction and low-excitation flag") {
    auto p = fixtures::case_b();
    const auto x = steady_state(build_system(p, 0.0));
    CHECK(excitation_fraction(x, p.N_atoms) == x.atomic_excitation() / 1e5);
    CHECK_FALSE(low_excitation_violated(x, p.N_atoms));
    p.drive_amplitude = 1e10;
    CHECK(low_excitation_violated(steady_state(build_system(p, 0.0)), p.N_atoms));
}
