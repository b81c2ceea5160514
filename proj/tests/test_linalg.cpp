#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "miot/linalg.hpp"

using namespace miot::linalg;
using cd = std::complex<double>;
constexpr std::size_t N = 5;

namespace {

Matrix<cd, N> random_matrix(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix<cd, N> m;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

Eigen::Matrix<cd, 5, 5> to_eigen(const Matrix<cd, N>& m) {
    Eigen::Matrix<cd, 5, 5> e;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) e(static_cast<int>(i), static_cast<int>(j)) = m(i, j);
    return e;
}

// Largest distance from each value in `a` to its greedy nearest partner in `b`.
double spectrum_distance(std::vector<cd> a, std::vector<cd> b) {
    double worst = 0.0;
    for (const cd& x : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](const cd& u, const cd& v) { return std::abs(u - x) < std::abs(v - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

} // namespace

TEST_CASE("LU solve agrees with Eigen's partial-pivot LU") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = random_matrix(rng, std::pow(10.0, trial % 7 - 3));
        Vector<cd, N> b;
        std::normal_distribution<double> g;
        for (auto& v : b) v = {g(rng), g(rng)};

        const auto x = solve(a, b);
        REQUIRE(x.has_value());
        Eigen::Matrix<cd, 5, 1> eb;
        for (int i = 0; i < 5; ++i) eb(i) = b[static_cast<std::size_t>(i)];
        const Eigen::Matrix<cd, 5, 1> ex = to_eigen(a).partialPivLu().solve(eb);
        for (int i = 0; i < 5; ++i) CHECK(std::abs((*x)[static_cast<std::size_t>(i)] - ex(i)) <= 1e-9 * ex.norm());
    }
}

TEST_CASE("LU flags exactly singular matrices") {
    Matrix<cd, N> a = Matrix<cd, N>::identity();
    a(2, 2) = 0.0;
    CHECK(LuFactorization<cd, N>(a).singular());
    CHECK_FALSE(solve(a, Vector<cd, N>{}).has_value());

    std::mt19937_64 rng(22);
    auto b = random_matrix(rng);
    for (std::size_t j = 0; j < N; ++j) b(4, j) = 2.0 * b(1, j) - b(3, j);
    CHECK(LuFactorization<cd, N>(b).singular());
}

TEST_CASE("matrix helpers") {
    std::mt19937_64 rng(23);
    const auto a = random_matrix(rng), b = random_matrix(rng);
    const auto ab = multiply(a, b);
    const Eigen::Matrix<cd, 5, 5> eab = to_eigen(a) * to_eigen(b);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            CHECK(std::abs(ab(i, j) - eab(static_cast<int>(i), static_cast<int>(j))) < 1e-12);
    const auto ah = adjoint(a);
    CHECK(ah(1, 3) == std::conj(a(3, 1)));
    CHECK(std::abs(frobenius_norm(a) - to_eigen(a).norm()) < 1e-12);

    // Gershgorin radius bounds every eigenvalue modulus.
    const Eigen::ComplexEigenSolver<Eigen::Matrix<cd, 5, 5>> es(to_eigen(a));
    for (int k = 0; k < 5; ++k) CHECK(std::abs(es.eigenvalues()(k)) <= gershgorin_bound(a) * (1 + 1e-12));
}

TEST_CASE("QR eigenvalues match Eigen's ComplexEigenSolver on random matrices") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_matrix(rng, std::pow(10.0, trial % 9 - 4));
        const auto eig = eigen_decompose(a);
        REQUIRE(eig.converged);

        const Eigen::ComplexEigenSolver<Eigen::Matrix<cd, 5, 5>> es(to_eigen(a));
        std::vector<cd> ours(eig.values.begin(), eig.values.end()), ref;
        for (int k = 0; k < 5; ++k) ref.push_back(es.eigenvalues()(k));
        CHECK(spectrum_distance(ours, ref) <= 1e-9 * frobenius_norm(a));

        for (std::size_t k = 0; k < N; ++k) {
            auto r = multiply(a, eig.vectors[k]);
            for (std::size_t i = 0; i < N; ++i) r[i] -= eig.values[k] * eig.vectors[k][i];
            CHECK(norm(r) <= 1e-11 * frobenius_norm(a));
            CHECK(std::abs(norm(eig.vectors[k]) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("QR handles structured matrices") {
    SECTION("diagonal") {
        Matrix<cd, N> a;
        for (std::size_t k = 0; k < N; ++k) a(k, k) = cd(double(k), -double(k) / 2);
        const auto eig = eigen_decompose(a);
        REQUIRE(eig.converged);
        std::vector<cd> ours(eig.values.begin(), eig.values.end()), ref;
        for (std::size_t k = 0; k < N; ++k) ref.push_back(a(k, k));
        CHECK(spectrum_distance(ours, ref) == 0.0);
    }
    SECTION("zero matrix") {
        const auto eig = eigen_decompose(Matrix<cd, N>{});
        REQUIRE(eig.converged);
        for (const auto& v : eig.values) CHECK(v == cd{});
    }
    SECTION("Hermitian gives real eigenvalues") {
        std::mt19937_64 rng(25);
        for (int trial = 0; trial < 200; ++trial) {
            auto a = random_matrix(rng);
            const auto ah = adjoint(a);
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j) a(i, j) = 0.5 * (a(i, j) + ah(i, j));
            const auto eig = eigen_decompose(a);
            REQUIRE(eig.converged);
            for (const auto& v : eig.values) CHECK(std::abs(v.imag()) < 1e-12 * frobenius_norm(a));
        }
    }
    SECTION("Jordan block") {
        Matrix<cd, N> a;
        for (std::size_t k = 0; k < N; ++k) a(k, k) = cd(2.0, -1.0);
        for (std::size_t k = 0; k + 1 < N; ++k) a(k, k + 1) = 1.0;
        const auto eig = eigen_decompose(a);
        REQUIRE(eig.converged);
        // Defective: eigenvalues only to about eps^(1/5).
        for (const auto& v : eig.values) CHECK(std::abs(v - cd(2.0, -1.0)) < 1e-2);
    }
    SECTION("widely separated scales") {
        Matrix<cd, N> a;
        const double scales[] = {1e7, 1e4, 1e3, 1e-1, 1e-3};
        std::mt19937_64 rng(26);
        std::normal_distribution<double> g;
        for (std::size_t i = 0; i < N; ++i) {
            a(i, i) = cd(scales[i], -scales[i] * 1e-3);
            for (std::size_t j = 0; j < N; ++j)
                if (i != j) a(i, j) = 1e-2 * std::sqrt(scales[i] * scales[j]) * g(rng);
        }
        const auto eig = eigen_decompose(a);
        REQUIRE(eig.converged);
        const Eigen::ComplexEigenSolver<Eigen::Matrix<cd, 5, 5>> es(to_eigen(a));
        std::vector<cd> ours(eig.values.begin(), eig.values.end()), ref;
        for (int k = 0; k < 5; ++k) ref.push_back(es.eigenvalues()(k));
        CHECK(spectrum_distance(ours, ref) <= 1e-9 * frobenius_norm(a));
    }
}
