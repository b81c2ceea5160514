#pragma once

// Small dense linear algebra for fixed dimensions: LU with partial
// pivoting and a complex Schur eigensolver. Sizes here are tiny (N <= 5)
// so everything lives on the stack.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>

namespace miot::linalg {

template <class T, std::size_t N>
using Vector = std::array<T, N>;

template <class T, std::size_t N>
struct Matrix {
    std::array<T, N * N> data{};

    constexpr T& operator()(std::size_t i, std::size_t j) noexcept { return data[i * N + j]; }
    constexpr const T& operator()(std::size_t i, std::size_t j) const noexcept { return data[i * N + j]; }

    static constexpr Matrix identity() noexcept {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = T{1};
        return m;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

template <class T>
inline double magnitude(const T& x) noexcept {
    return std::abs(x);
}

template <class T, std::size_t N>
Vector<T, N> multiply(const Matrix<T, N>& a, const Vector<T, N>& x) noexcept {
    Vector<T, N> y{};
    for (std::size_t i = 0; i < N; ++i) {
        T acc{};
        for (std::size_t j = 0; j < N; ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

template <class T, std::size_t N>
Matrix<T, N> multiply(const Matrix<T, N>& a, const Matrix<T, N>& b) noexcept {
    Matrix<T, N> c;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const T aik = a(i, k);
            for (std::size_t j = 0; j < N; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <class T, std::size_t N>
Matrix<T, N> adjoint(const Matrix<T, N>& a) noexcept {
    Matrix<T, N> h;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            if constexpr (requires { std::conj(a(j, i)); })
                h(i, j) = std::conj(a(j, i));
            else
                h(i, j) = a(j, i);
        }
    return h;
}

template <class T, std::size_t N>
double norm(const Vector<T, N>& x) noexcept {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(std::complex<double>(v));
    return std::sqrt(s);
}

template <class T, std::size_t N>
double frobenius_norm(const Matrix<T, N>& a) noexcept {
    double s = 0.0;
    for (const auto& v : a.data) s += std::norm(std::complex<double>(v));
    return std::sqrt(s);
}

/// Largest absolute row sum; bounds the spectral radius (Gershgorin).
template <class T, std::size_t N>
double gershgorin_bound(const Matrix<T, N>& a) noexcept {
    double bound = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) row += magnitude(a(i, j));
        bound = std::max(bound, row);
    }
    return bound;
}

/// LU factorization with partial (row) pivoting, PA = LU.
template <class T, std::size_t N>
class LuFactorization {
public:
    /// Pivots smaller than `relative_tolerance * max|a_ij|` mark the matrix singular.
    explicit LuFactorization(const Matrix<T, N>& a, double relative_tolerance = 1e-14) : lu_(a) {
        double scale = 0.0;
        for (const auto& v : a.data) scale = std::max(scale, magnitude(v));
        const double threshold = relative_tolerance * scale;
        for (std::size_t i = 0; i < N; ++i) perm_[i] = i;

        singular_ = scale == 0.0;
        for (std::size_t k = 0; k < N && !singular_; ++k) {
            std::size_t p = k;
            double best = magnitude(lu_(k, k));
            for (std::size_t i = k + 1; i < N; ++i) {
                const double m = magnitude(lu_(i, k));
                if (m > best) {
                    best = m;
                    p = i;
                }
            }
            if (!(best > threshold)) {
                singular_ = true;
                break;
            }
            if (p != k) {
                for (std::size_t j = 0; j < N; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(perm_[k], perm_[p]);
            }
            const T pivot = lu_(k, k);
            for (std::size_t i = k + 1; i < N; ++i) {
                const T factor = lu_(i, k) / pivot;
                lu_(i, k) = factor;
                for (std::size_t j = k + 1; j < N; ++j) lu_(i, j) -= factor * lu_(k, j);
            }
        }
    }

    bool singular() const noexcept { return singular_; }

    /// Solves A x = b. Undefined if singular().
    Vector<T, N> solve(const Vector<T, N>& b) const noexcept {
        Vector<T, N> x;
        for (std::size_t i = 0; i < N; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t i = N; i-- > 0;) {
            for (std::size_t j = i + 1; j < N; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

private:
    Matrix<T, N> lu_;
    std::array<std::size_t, N> perm_{};
    bool singular_ = false;
};

template <class T, std::size_t N>
std::optional<Vector<T, N>> solve(const Matrix<T, N>& a, const Vector<T, N>& b) {
    LuFactorization<T, N> lu(a);
    if (lu.singular()) return std::nullopt;
    return lu.solve(b);
}

template <std::size_t N>
struct EigenDecomposition {
    Vector<std::complex<double>, N> values{};
    std::array<Vector<std::complex<double>, N>, N> vectors{}; ///< unit-norm right eigenvectors
    int iterations = 0;
    bool converged = false;
};

namespace detail {

using cplx = std::complex<double>;

// Rotation G = [c s; -conj(s) c] with G [a; b] = [r; 0].
struct Givens {
    double c = 1.0;
    cplx s{};
};

inline Givens make_givens(cplx a, cplx b) noexcept {
    const double nb = std::abs(b);
    if (nb == 0.0) return {1.0, {}};
    const double na = std::abs(a);
    if (na == 0.0) return {0.0, cplx{1.0, 0.0}};
    const double r = std::hypot(na, nb);
    return {na / r, (a / na) * std::conj(b) / r};
}

template <std::size_t N>
void rotate_rows(Matrix<cplx, N>& h, std::size_t k, const Givens& g, std::size_t col_begin) noexcept {
    for (std::size_t j = col_begin; j < N; ++j) {
        const cplx x = h(k, j), y = h(k + 1, j);
        h(k, j) = g.c * x + g.s * y;
        h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
    }
}

template <std::size_t N>
void rotate_cols(Matrix<cplx, N>& h, std::size_t k, const Givens& g, std::size_t row_end) noexcept {
    for (std::size_t i = 0; i < row_end; ++i) {
        const cplx x = h(i, k), y = h(i, k + 1);
        h(i, k) = x * g.c + y * std::conj(g.s);
        h(i, k + 1) = -x * g.s + y * g.c;
    }
}

// Householder reduction to upper Hessenberg form, accumulating Z.
template <std::size_t N>
void hessenberg(Matrix<cplx, N>& h, Matrix<cplx, N>& z) noexcept {
    for (std::size_t k = 0; k + 2 < N; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < N; ++i) xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0, 0.0} : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;

        Vector<cplx, N> v{};
        for (std::size_t i = k + 1; i < N; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        const double vnorm = norm(v);
        if (vnorm == 0.0) continue;
        for (auto& e : v) e /= vnorm;

        // H <- (I - 2 v v^H) H
        for (std::size_t j = 0; j < N; ++j) {
            cplx dot{};
            for (std::size_t i = k + 1; i < N; ++i) dot += std::conj(v[i]) * h(i, j);
            for (std::size_t i = k + 1; i < N; ++i) h(i, j) -= 2.0 * v[i] * dot;
        }
        // H <- H (I - 2 v v^H), Z <- Z (I - 2 v v^H)
        for (auto* m : {&h, &z}) {
            for (std::size_t i = 0; i < N; ++i) {
                cplx dot{};
                for (std::size_t j = k + 1; j < N; ++j) dot += (*m)(i, j) * v[j];
                for (std::size_t j = k + 1; j < N; ++j) (*m)(i, j) -= 2.0 * dot * std::conj(v[j]);
            }
        }
        for (std::size_t i = k + 2; i < N; ++i) h(i, k) = 0.0;
    }
}

inline cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) noexcept {
    const cplx half_tr = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    const cplx l1 = half_tr + disc, l2 = half_tr - disc;
    return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

} // namespace detail

/// Eigenvalues and right eigenvectors of a general complex matrix via
/// Hessenberg reduction, single-shift QR to Schur form, and
/// back-substitution on the triangular factor.
template <std::size_t N>
EigenDecomposition<N> eigen_decompose(const Matrix<std::complex<double>, N>& a, int max_iterations_per_value = 60) {
    using detail::cplx;
    EigenDecomposition<N> out;
    Matrix<cplx, N> h = a;
    Matrix<cplx, N> z = Matrix<cplx, N>::identity();
    const double anorm = frobenius_norm(a);
    const double eps = std::numeric_limits<double>::epsilon();

    if (anorm == 0.0) {
        for (std::size_t k = 0; k < N; ++k) out.vectors[k][k] = 1.0;
        out.converged = true;
        return out;
    }

    detail::hessenberg(h, z);

    std::size_t hi = N - 1;
    int iter = 0;
    while (hi > 0) {
        std::size_t lo = hi;
        while (lo > 0) {
            const double local = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
            const double ref = local == 0.0 ? anorm : local;
            if (std::abs(h(lo, lo - 1)) <= eps * ref) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            --hi;
            iter = 0;
            continue;
        }
        if (++iter > max_iterations_per_value) return out;
        ++out.iterations;

        cplx mu = detail::wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
        if (iter % 11 == 0) mu += std::abs(h(hi, hi - 1)); // exceptional shift

        for (std::size_t k = lo; k <= hi; ++k) h(k, k) -= mu;
        std::array<detail::Givens, N> rot{};
        for (std::size_t k = lo; k < hi; ++k) {
            rot[k] = detail::make_givens(h(k, k), h(k + 1, k));
            detail::rotate_rows(h, k, rot[k], k);
            h(k + 1, k) = 0.0;
        }
        for (std::size_t k = lo; k < hi; ++k) {
            detail::rotate_cols(h, k, rot[k], std::min(k + 2, hi + 1));
            detail::rotate_cols(z, k, rot[k], N);
        }
        for (std::size_t k = lo; k <= hi; ++k) h(k, k) += mu;
    }

    for (std::size_t k = 0; k < N; ++k) out.values[k] = h(k, k);

    const double small = eps * anorm;
    for (std::size_t k = 0; k < N; ++k) {
        Vector<cplx, N> y{};
        y[k] = 1.0;
        for (std::size_t i = k; i-- > 0;) {
            cplx acc{};
            for (std::size_t j = i + 1; j <= k; ++j) acc += h(i, j) * y[j];
            cplx denom = h(i, i) - h(k, k);
            if (std::abs(denom) < small) denom = small;
            y[i] = -acc / denom;
        }
        Vector<cplx, N> v = multiply(z, y);
        const double vn = norm(v);
        for (auto& e : v) e /= vn;
        out.vectors[k] = v;
    }
    out.converged = true;
    return out;
}

} // namespace miot::linalg
