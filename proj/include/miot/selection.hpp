#pragma once

// Angular-momentum coupling for the Raman beam that connects the 3P1
// manifold to 3S1: Clebsch-Gordan coefficients (Condon-Shortley phase),
// Cartesian 3P1 states, and dipole matrix elements in units of the reduced
// matrix element.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "miot/error.hpp"

namespace miot::selection {

using complex = std::complex<double>;

namespace detail {

using wide = __int128;

inline wide gcd(wide a, wide b) noexcept {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Overflow in any exact step is recorded instead of wrapping.
struct Overflow {
    bool hit = false;
};

inline wide mul(wide a, wide b, Overflow& o) noexcept {
    wide r = 0;
    if (__builtin_mul_overflow(a, b, &r)) o.hit = true;
    return r;
}

inline wide add(wide a, wide b, Overflow& o) noexcept {
    wide r = 0;
    if (__builtin_add_overflow(a, b, &r)) o.hit = true;
    return r;
}

struct Rational {
    wide num = 0;
    wide den = 1;

    static Rational make(wide n, wide d) noexcept {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const wide g = gcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        return {n, d};
    }
    static Rational times(Rational a, Rational b, Overflow& o) noexcept {
        const wide g1 = gcd(a.num, b.den), g2 = gcd(b.num, a.den);
        const wide s1 = g1 == 0 ? 1 : g1, s2 = g2 == 0 ? 1 : g2;
        return make(mul(a.num / s1, b.num / s2, o), mul(a.den / s2, b.den / s1, o));
    }
    static Rational plus(Rational a, Rational b, Overflow& o) noexcept {
        const wide g = gcd(a.den, b.den);
        return make(add(mul(a.num, b.den / g, o), mul(b.num, a.den / g, o), o), mul(a.den / g, b.den, o));
    }
    double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

inline wide factorial(int n, Overflow& o) noexcept {
    wide f = 1;
    for (int k = 2; k <= n; ++k) f = mul(f, k, o);
    return f;
}

inline long double factorial_ld(int n) noexcept {
    long double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Doubled quantum number, e.g. 3/2 -> 3. Throws on non-half-integers.
inline int twice(double q) {
    const double t = 2.0 * q;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9) throw Error(ErrorCode::InvalidQuantumNumbers, "not a half-integer");
    return static_cast<int>(r);
}

} // namespace detail

/// Largest angular momentum accepted by clebsch_gordan.
inline constexpr double max_supported_j = 8.0;

/// <j1 m1; j2 m2 | J M> via the Racah sum, evaluated exactly as
/// sign * sqrt(rational) so equal-magnitude coefficients are bit-identical.
/// Falls back to extended-precision floating point if 128-bit integers overflow
/// (only for the largest couplings).
inline double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
    const int tj1 = detail::twice(j1), tm1 = detail::twice(m1);
    const int tj2 = detail::twice(j2), tm2 = detail::twice(m2);
    const int tJ = detail::twice(J), tM = detail::twice(M);

    const auto check = [](int tj, int tm) {
        if (tj < 0) throw Error(ErrorCode::InvalidQuantumNumbers, "negative angular momentum");
        if (tj > 2 * max_supported_j) throw Error(ErrorCode::InvalidQuantumNumbers, "angular momentum too large");
        if (std::abs(tm) > tj || (tj - tm) % 2 != 0)
            throw Error(ErrorCode::InvalidQuantumNumbers, "projection outside {-j, ..., j}");
    };
    check(tj1, tm1);
    check(tj2, tm2);
    check(tJ, tM);

    if (tm1 + tm2 != tM) return 0.0;
    if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2 || (tj1 + tj2 + tJ) % 2 != 0) return 0.0;

    // Half of doubled sums are the integer factorial arguments.
    const int a = (tj1 + tj2 - tJ) / 2;  // j1 + j2 - J
    const int b = (tj1 - tm1) / 2;       // j1 - m1
    const int c = (tj2 + tm2) / 2;       // j2 + m2
    const int d = (tJ - tj2 + tm1) / 2;  // J - j2 + m1
    const int e = (tJ - tj1 - tm2) / 2;  // J - j1 - m2

    using detail::Rational;
    detail::Overflow of;
    const auto f = [&of](int n) { return detail::factorial(n, of); };
    const auto m3 = [&of](detail::wide x, detail::wide y, detail::wide z) {
        return detail::mul(detail::mul(x, y, of), z, of);
    };
    const Rational prefactor = Rational::times(
        Rational::times(Rational::make(m3(tJ + 1, f((tJ + tj1 - tj2) / 2), m3(f((tJ - tj1 + tj2) / 2), f(a), 1)),
                                       f((tj1 + tj2 + tJ) / 2 + 1)),
                        Rational::make(m3(f((tJ + tM) / 2), f((tJ - tM) / 2), m3(f(b), f((tj1 + tm1) / 2), 1)), 1),
                        of),
        Rational::make(detail::mul(f((tj2 - tm2) / 2), f(c), of), 1), of);

    const int k_min = std::max({0, -d, -e});
    const int k_max = std::min({a, b, c});
    Rational sum{};
    for (int k = k_min; k <= k_max; ++k) {
        const detail::wide den = m3(m3(f(k), f(a - k), f(b - k)), m3(f(c - k), f(d + k), f(e + k)), 1);
        sum = Rational::plus(sum, Rational::make(k % 2 == 0 ? 1 : -1, den), of);
    }
    if (!of.hit) {
        if (sum.num == 0) return 0.0;
        const Rational squared = Rational::times(Rational::times(prefactor, sum, of), sum, of);
        if (!of.hit) {
            const double magnitude = std::sqrt(squared.to_double());
            return sum.num > 0 ? magnitude : -magnitude;
        }
    }

    using detail::factorial_ld;
    const long double pre =
        std::sqrt((tJ + 1) * factorial_ld((tJ + tj1 - tj2) / 2) * factorial_ld((tJ - tj1 + tj2) / 2) * factorial_ld(a) /
                  factorial_ld((tj1 + tj2 + tJ) / 2 + 1) * factorial_ld((tJ + tM) / 2) * factorial_ld((tJ - tM) / 2) *
                  factorial_ld(b) * factorial_ld((tj1 + tm1) / 2) * factorial_ld((tj2 - tm2) / 2) * factorial_ld(c));
    long double total = 0;
    for (int k = k_min; k <= k_max; ++k)
        total += (k % 2 == 0 ? 1.0L : -1.0L) / (factorial_ld(k) * factorial_ld(a - k) * factorial_ld(b - k) *
                                               factorial_ld(c - k) * factorial_ld(d + k) * factorial_ld(e + k));
    return static_cast<double>(pre * total);
}

enum class Level { P1, S1 };

struct AngularState {
    double J = 1.0;
    double mJ = 0.0;
    Level label = Level::P1;
};

enum class Axis { x, y, z };

inline std::string to_string(Axis a) {
    switch (a) {
    case Axis::x: return "e_x";
    case Axis::y: return "e_y";
    case Axis::z: return "e_z";
    }
    return "?";
}

/// 3P1 state along a Cartesian axis, amplitudes indexed by mJ + 1 (mJ = -1, 0, +1):
///   e_x = -(|+1> - |-1>)/sqrt2,  e_y = i(|+1> + |-1>)/sqrt2,  e_z = |0>.
struct CartesianP1State {
    Axis axis = Axis::x;
    std::array<complex, 3> decomposition{};

    complex amplitude(int mJ) const { return decomposition.at(static_cast<std::size_t>(mJ + 1)); }
};

inline CartesianP1State cartesian_state(Axis axis) {
    const double r = std::sqrt(0.5);
    switch (axis) {
    case Axis::x: return {axis, {complex{r}, complex{}, complex{-r}}};
    case Axis::y: return {axis, {complex{0.0, r}, complex{}, complex{0.0, r}}};
    case Axis::z: return {axis, {complex{}, complex{1.0}, complex{}}};
    }
    return {};
}

enum class Polarization { x, y, z, plus, minus };

inline std::string to_string(Polarization p) {
    switch (p) {
    case Polarization::x: return "x";
    case Polarization::y: return "y";
    case Polarization::z: return "z";
    case Polarization::plus: return "plus";
    case Polarization::minus: return "minus";
    }
    return "?";
}

/// Coefficients c_q with d . e = sum_q c_q d_q over spherical components
/// q = -1, 0, +1 (index q + 1), where d_{+-1} = -+(d_x +- i d_y)/sqrt2.
inline std::array<complex, 3> spherical_components(Polarization pol) {
    const double r = std::sqrt(0.5);
    switch (pol) {
    case Polarization::x: return {complex{r}, complex{}, complex{-r}};
    case Polarization::y: return {complex{0.0, r}, complex{}, complex{0.0, r}};
    case Polarization::z: return {complex{}, complex{1.0}, complex{}};
    case Polarization::plus: return {complex{}, complex{}, complex{-1.0}};
    case Polarization::minus: return {complex{1.0}, complex{}, complex{}};
    }
    return {};
}

namespace detail {

inline void require_p1_s1(double J_initial, Level initial, const AngularState& final_state) {
    if (initial != Level::P1 || final_state.label != Level::S1 || J_initial != 1.0 || final_state.J != 1.0)
        throw Error(ErrorCode::UnsupportedTransition, "only 3P1 (J=1) -> 3S1 (J=1) is supported");
}

inline complex element_from(const std::array<complex, 3>& initial_amps, const AngularState& final_state,
                            Polarization pol) {
    const auto comps = spherical_components(pol);
    complex total{};
    for (int m = -1; m <= 1; ++m) {
        const complex am = initial_amps[static_cast<std::size_t>(m + 1)];
        if (am == complex{}) continue;
        for (int q = -1; q <= 1; ++q) {
            const complex cq = comps[static_cast<std::size_t>(q + 1)];
            if (cq == complex{}) continue;
            const double cg = clebsch_gordan(1, m, 1, q, final_state.J, final_state.mJ);
            if (cg == 0.0) continue;
            total += (am * cq) * cg;
        }
    }
    return total;
}

} // namespace detail

/// <final| d . e_pol |initial> in units of the reduced matrix element.
inline complex dipole_element(const AngularState& initial, const AngularState& final_state, Polarization pol) {
    detail::require_p1_s1(initial.J, initial.label, final_state);
    const int tm = detail::twice(initial.mJ);
    if (tm % 2 != 0 || std::abs(tm) > 2) throw Error(ErrorCode::InvalidQuantumNumbers, "mJ outside {-1, 0, 1}");
    std::array<complex, 3> amps{};
    amps[static_cast<std::size_t>(tm / 2 + 1)] = 1.0;
    return detail::element_from(amps, final_state, pol);
}

inline complex dipole_element(const CartesianP1State& initial, const AngularState& final_state, Polarization pol) {
    detail::require_p1_s1(1.0, Level::P1, final_state);
    return detail::element_from(initial.decomposition, final_state, pol);
}

struct TableEntry {
    std::string initial;   ///< "e_x", "e_y", "e_z" or "e_{m}"
    int final_mJ = 0;      ///< 3S1 projection
    Polarization polarization = Polarization::x;
    complex value{};
    bool nonzero = false;
    int expected = -1;     ///< 1 nonzero, 0 zero, -1 informational
    bool pass = true;
};

struct SelectionReport {
    std::vector<TableEntry> x_table;     ///< Cartesian 3P1 x 3S1 mJ under x polarization
    std::vector<TableEntry> z_table;     ///< same under z polarization (informational)
    std::vector<TableEntry> sigma_table; ///< spherical 3P1 states under sigma+- polarization
    complex sigma_plus_from_minus1{};    ///< <s_0| d.e_+ |e_-1>
    complex sigma_minus_from_plus1{};    ///< <s_0| d.e_- |e_+1>
    bool x_pattern_ok = false;
    bool sigma_equality_ok = false;
    bool sigma_zeros_ok = false;
    bool all_ok = false;
};

/// Zero test used throughout: exact or below 1e-14.
inline bool is_zero(complex v) noexcept { return std::abs(v) < 1e-14; }

inline SelectionReport verify_selection_rules() {
    SelectionReport rep;
    const AngularState s[] = {{1, -1, Level::S1}, {1, 0, Level::S1}, {1, 1, Level::S1}};

    rep.x_pattern_ok = true;
    for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
        for (const auto& fs : s) {
            for (Polarization pol : {Polarization::x, Polarization::z}) {
                TableEntry e;
                e.initial = to_string(axis);
                e.final_mJ = static_cast<int>(fs.mJ);
                e.polarization = pol;
                e.value = dipole_element(cartesian_state(axis), fs, pol);
                e.nonzero = !is_zero(e.value);
                if (pol == Polarization::x && axis != Axis::z) {
                    e.expected = (axis == Axis::y && e.final_mJ == 0) ? 1 : 0;
                    e.pass = e.nonzero == (e.expected == 1);
                    rep.x_pattern_ok = rep.x_pattern_ok && e.pass;
                }
                (pol == Polarization::x ? rep.x_table : rep.z_table).push_back(e);
            }
        }
    }

    rep.sigma_zeros_ok = true;
    for (int m : {-1, 0, 1}) {
        for (const auto& fs : s) {
            for (Polarization pol : {Polarization::plus, Polarization::minus}) {
                TableEntry e;
                e.initial = "e_" + std::to_string(m);
                e.final_mJ = static_cast<int>(fs.mJ);
                e.polarization = pol;
                e.value = dipole_element(AngularState{1, static_cast<double>(m), Level::P1}, fs, pol);
                e.nonzero = !is_zero(e.value);
                if (m != 0 && e.final_mJ != 0) {
                    e.expected = 0;
                    e.pass = !e.nonzero;
                    rep.sigma_zeros_ok = rep.sigma_zeros_ok && e.pass;
                }
                rep.sigma_table.push_back(e);
            }
        }
    }

    rep.sigma_plus_from_minus1 = dipole_element(AngularState{1, -1, Level::P1}, s[1], Polarization::plus);
    rep.sigma_minus_from_plus1 = dipole_element(AngularState{1, 1, Level::P1}, s[1], Polarization::minus);
    rep.sigma_equality_ok =
        rep.sigma_plus_from_minus1 == rep.sigma_minus_from_plus1 && !is_zero(rep.sigma_plus_from_minus1);

    rep.all_ok = rep.x_pattern_ok && rep.sigma_equality_ok && rep.sigma_zeros_ok;
    return rep;
}

/// Largest deviation of sum_{m1,m2} <j1 m1; j2 m2|J M><j1 m1; j2 m2|J' M'>
/// from delta_{JJ'} delta_{MM'} over all couplings of j1 and j2.
inline double cg_orthogonality_error(double j1, double j2) {
    const int tj1 = detail::twice(j1), tj2 = detail::twice(j2);
    double worst = 0.0;
    for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2)
        for (int tM = -tJ; tM <= tJ; tM += 2)
            for (int tJp = std::abs(tj1 - tj2); tJp <= tj1 + tj2; tJp += 2)
                for (int tMp = -tJp; tMp <= tJp; tMp += 2) {
                    double sum = 0.0;
                    for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
                        for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2)
                            sum += clebsch_gordan(j1, tm1 / 2.0, j2, tm2 / 2.0, tJ / 2.0, tM / 2.0) *
                                   clebsch_gordan(j1, tm1 / 2.0, j2, tm2 / 2.0, tJp / 2.0, tMp / 2.0);
                    const double expected = (tJ == tJp && tM == tMp) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(sum - expected));
                }
    return worst;
}

} // namespace miot::selection
