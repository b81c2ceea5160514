#pragma once

// JSON parameter documents and serialization of results. Frequencies are
// written as ordinary frequencies in Hz (keys suffixed with _Hz).

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "miot/analysis.hpp"
#include "miot/core.hpp"
#include "miot/eigenmodes.hpp"
#include "miot/selection.hpp"
#include "miot/spectrum.hpp"
#include "miot/units.hpp"

namespace miot::io {

using nlohmann::json;

/// Malformed configuration (as opposed to a well-formed but invalid one).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double number(const json& j, std::string_view what) {
    if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
    return j.get<double>();
}

inline double unit_factor(const json& j, std::string_view what) {
    if (!j.contains("unit")) throw ParseError(std::string(what) + ": missing \"unit\"");
    if (!j.at("unit").is_string()) throw ParseError(std::string(what) + ": \"unit\" must be a string");
    const auto scale = unit_scale(j.at("unit").get<std::string>());
    if (!scale) throw ParseError(std::string(what) + ": unit must be Hz, kHz or MHz");
    return two_pi * *scale;
}

inline void only_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError(std::string(what) + ": unknown key \"" + key + "\"");
    }
}

// {"value": v, "unit": "kHz"} -> angular frequency.
inline double frequency(const json& j, std::string_view what) {
    if (!j.is_object()) throw ParseError(std::string(what) + R"(: expected {"value", "unit"})");
    only_keys(j, {"value", "unit"}, what);
    if (!j.contains("value")) throw ParseError(std::string(what) + ": missing \"value\"");
    return number(j.at("value"), what) * unit_factor(j, what);
}

// {"re": a, "im": b, "unit": "MHz"}; a purely real {"value", "unit"} is accepted too.
inline complex complex_frequency(const json& j, std::string_view what) {
    if (j.is_object() && j.contains("value")) return {frequency(j, what), 0.0};
    if (!j.is_object()) throw ParseError(std::string(what) + R"(: expected {"re", "im", "unit"})");
    only_keys(j, {"re", "im", "unit"}, what);
    const double f = unit_factor(j, what);
    const double re = j.contains("re") ? number(j.at("re"), what) : 0.0;
    const double im = j.contains("im") ? number(j.at("im"), what) : 0.0;
    return {re * f, im * f};
}

} // namespace detail

/// Builds (unvalidated) parameters from a JSON document. Absent keys keep
/// their defaults; unknown keys are rejected.
inline PhysicalParams params_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("parameter document must be a JSON object");
    detail::only_keys(j,
                      {"omega_A", "Omega_N", "N_atoms", "Delta", "mu", "B", "kappa", "gamma", "Gamma_S", "g_alpha",
                       "g_beta", "drive_amplitude", "fluct"},
                      "parameters");
    PhysicalParams p;
    const auto freq = [&](const char* key, double& out) {
        if (j.contains(key)) out = detail::frequency(j.at(key), key);
    };
    freq("omega_A", p.omega_A);
    freq("Omega_N", p.Omega_N);
    freq("kappa", p.kappa);
    freq("gamma", p.gamma);
    freq("Gamma_S", p.Gamma_S);
    if (j.contains("Delta")) p.Delta = detail::frequency(j.at("Delta"), "Delta");
    if (j.contains("N_atoms")) {
        const auto& n = j.at("N_atoms");
        if (!n.is_number_integer()) throw ParseError("N_atoms: expected an integer");
        p.N_atoms = n.get<std::int64_t>();
    }
    // mu is rad/s per tesla: a plain number, or a unit-wrapped ordinary frequency per tesla.
    if (j.contains("mu"))
        p.mu = j.at("mu").is_object() ? detail::frequency(j.at("mu"), "mu") : detail::number(j.at("mu"), "mu");
    if (j.contains("B")) p.B = detail::number(j.at("B"), "B");
    if (j.contains("g_alpha")) p.g_alpha = detail::complex_frequency(j.at("g_alpha"), "g_alpha");
    if (j.contains("g_beta")) p.g_beta = detail::complex_frequency(j.at("g_beta"), "g_beta");
    if (j.contains("drive_amplitude")) p.drive_amplitude = detail::number(j.at("drive_amplitude"), "drive_amplitude");
    if (j.contains("fluct")) {
        const auto& f = j.at("fluct");
        if (!f.is_object()) throw ParseError("fluct: expected an object");
        detail::only_keys(f, {"Delta_c", "Delta_t", "Delta_r"}, "fluct");
        if (f.contains("Delta_c")) p.fluct.Delta_c = detail::frequency(f.at("Delta_c"), "Delta_c");
        if (f.contains("Delta_t")) p.fluct.Delta_t = detail::frequency(f.at("Delta_t"), "Delta_t");
        if (f.contains("Delta_r")) p.fluct.Delta_r = detail::frequency(f.at("Delta_r"), "Delta_r");
    }
    return p;
}

inline PhysicalParams params_from_string(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return params_from_json(j);
}

inline PhysicalParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return params_from_string(buf.str());
}

inline json hz(double angular) { return json{{"value", to_hz(angular)}, {"unit", "Hz"}}; }

/// Round-trips through params_from_json.
inline json params_to_json(const PhysicalParams& p) {
    json j{{"omega_A", hz(p.omega_A)},
           {"Omega_N", hz(p.Omega_N)},
           {"N_atoms", p.N_atoms},
           {"kappa", hz(p.kappa)},
           {"gamma", hz(p.gamma)},
           {"Gamma_S", hz(p.Gamma_S)},
           {"g_alpha", {{"re", to_hz(p.g_alpha.real())}, {"im", to_hz(p.g_alpha.imag())}, {"unit", "Hz"}}},
           {"g_beta", {{"re", to_hz(p.g_beta.real())}, {"im", to_hz(p.g_beta.imag())}, {"unit", "Hz"}}},
           {"drive_amplitude", p.drive_amplitude},
           {"fluct", {{"Delta_c", hz(p.fluct.Delta_c)}, {"Delta_t", hz(p.fluct.Delta_t)}, {"Delta_r", hz(p.fluct.Delta_r)}}}};
    if (p.Delta) j["Delta"] = hz(*p.Delta);
    if (p.mu) j["mu"] = *p.mu;
    if (p.B) j["B"] = *p.B;
    return j;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

inline void write_csv_row(std::ostream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << format_number(v);
        first = false;
    }
    out << '\n';
}

// ---- spectrum ----

inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "delta_p_Hz,P_T\n";
    for (const auto& pt : s.points) write_csv_row(out, {to_hz(pt.delta_p), pt.P_T});
}

inline json spectrum_to_json(const Spectrum& s) {
    json pts = json::array();
    for (const auto& pt : s.points) pts.push_back({{"delta_p_Hz", to_hz(pt.delta_p)}, {"P_T", pt.P_T}});
    return {{"grid",
             {{"min_Hz", to_hz(s.grid.min)},
              {"max_Hz", to_hz(s.grid.max)},
              {"count", s.grid.count},
              {"refine", s.grid.refine}}},
            {"params_hash", s.params_hash},
            {"points", pts}};
}

// ---- peak ----

inline json peak_to_json(const PeakReport& r) {
    return {{"position_Hz", to_hz(r.position)},
            {"height", r.height},
            {"fwhm_Hz", to_hz(r.fwhm)},
            {"rabi_peaks_Hz", {to_hz(r.rabi_peaks.first), to_hz(r.rabi_peaks.second)}},
            {"search_window_Hz", {to_hz(r.search_window.lo), to_hz(r.search_window.hi)}},
            {"method",
             {{"scan_points", r.scan_points},
              {"polish_iterations", r.polish_iterations},
              {"tolerance_Hz", to_hz(r.tolerance)}}},
            {"width_approx_Hz", to_hz(r.width_approx)},
            {"height_approx", r.height_approx}};
}

inline constexpr std::string_view peak_csv_header =
    "position_Hz,height,fwhm_Hz,rabi_lo_Hz,rabi_hi_Hz,width_approx_Hz,height_approx\n";

inline void write_peak_csv(std::ostream& out, const PeakReport& r) {
    out << peak_csv_header;
    write_csv_row(out, {to_hz(r.position), r.height, to_hz(r.fwhm), to_hz(r.rabi_peaks.first),
                        to_hz(r.rabi_peaks.second), to_hz(r.width_approx), r.height_approx});
}

// ---- pulling ----

inline json pulling_to_json(const PullingReport& r) {
    const auto coeff = [](const PullingCoefficient& c, double approx) {
        return json{{"value", c.value},
                    {"approx", approx},
                    {"step_Hz", to_hz(c.step)},
                    {"richardson_levels", c.richardson_levels}};
    };
    return {{"c_c", coeff(r.c_c, r.approx_c_c)},
            {"c_t", coeff(r.c_t, r.approx_c_t)},
            {"c_r", coeff(r.c_r, r.approx_c_r)},
            {"base_position_Hz", to_hz(r.base_position)},
            {"base_fwhm_Hz", to_hz(r.base_fwhm)}};
}

inline void write_pulling_csv(std::ostream& out, const PullingReport& r) {
    out << "c_c,c_t,c_r,approx_c_c,approx_c_t,approx_c_r,step_Hz\n";
    write_csv_row(out, {r.c_c.value, r.c_t.value, r.c_r.value, r.approx_c_c, r.approx_c_t, r.approx_c_r,
                        to_hz(r.c_c.step)});
}

// ---- eigenmodes ----

inline json eigen_to_json(const ModeDecomposition& d, const PerturbativeDarkState& s) {
    json modes = json::array();
    for (std::size_t k = 0; k < mode_count; ++k) {
        json vec = json::array();
        for (const auto& c : d.right_eigenvectors[k]) vec.push_back({c.real(), c.imag()});
        modes.push_back({{"eigenvalue_Hz", {to_hz(d.eigenvalues[k].real()), to_hz(d.eigenvalues[k].imag())}},
                         {"peak_position_Hz", to_hz(d.peak_position(k))},
                         {"linewidth_Hz", to_hz(d.linewidth(k))},
                         {"probe_weight", d.probe_weight[k]},
                         {"vector", vec}});
    }
    return {{"modes", modes},
            {"dark_index", d.dark_index},
            {"qr_iterations", d.iterations},
            {"perturbative_dark",
             {{"amplitude_g1", {s.amplitude_g1.real(), s.amplitude_g1.imag()}},
              {"energy_Hz", to_hz(s.energy)},
              {"decay_estimate_Hz", to_hz(s.decay_estimate)},
              {"decay_estimate_weak_field_Hz", to_hz(s.decay_estimate_weak_field)},
              {"outside_perturbative_regime", s.outside_perturbative_regime}}}};
}

inline void write_eigen_csv(std::ostream& out, const ModeDecomposition& d) {
    out << "index,re_Hz,im_Hz,peak_position_Hz,linewidth_Hz,probe_weight,dark\n";
    for (std::size_t k = 0; k < mode_count; ++k) {
        out << k << ',';
        write_csv_row(out, {to_hz(d.eigenvalues[k].real()), to_hz(d.eigenvalues[k].imag()), to_hz(d.peak_position(k)),
                            to_hz(d.linewidth(k)), d.probe_weight[k], k == d.dark_index ? 1.0 : 0.0});
    }
}

// ---- selection rules ----

inline json selection_to_json(const selection::SelectionReport& r) {
    const auto table = [](const std::vector<selection::TableEntry>& rows) {
        json t = json::array();
        for (const auto& e : rows)
            t.push_back({{"initial", e.initial},
                         {"final_mJ", e.final_mJ},
                         {"polarization", selection::to_string(e.polarization)},
                         {"value", {e.value.real(), e.value.imag()}},
                         {"nonzero", e.nonzero},
                         {"pass", e.pass}});
        return t;
    };
    return {{"x_table", table(r.x_table)},
            {"z_table", table(r.z_table)},
            {"sigma_table", table(r.sigma_table)},
            {"sigma_plus_from_minus1", {r.sigma_plus_from_minus1.real(), r.sigma_plus_from_minus1.imag()}},
            {"sigma_minus_from_plus1", {r.sigma_minus_from_plus1.real(), r.sigma_minus_from_plus1.imag()}},
            {"x_pattern_ok", r.x_pattern_ok},
            {"sigma_equality_ok", r.sigma_equality_ok},
            {"sigma_zeros_ok", r.sigma_zeros_ok},
            {"all_ok", r.all_ok}};
}

inline void write_selection_csv(std::ostream& out, const selection::SelectionReport& r) {
    out << "table,initial,final_mJ,polarization,re,im,nonzero,pass\n";
    const auto rows = [&](const char* name, const std::vector<selection::TableEntry>& t) {
        for (const auto& e : t)
            out << name << ',' << e.initial << ',' << e.final_mJ << ',' << selection::to_string(e.polarization) << ','
                << format_number(e.value.real()) << ',' << format_number(e.value.imag()) << ',' << e.nonzero << ','
                << e.pass << '\n';
    };
    rows("x", r.x_table);
    rows("z", r.z_table);
    rows("sigma", r.sigma_table);
}

} // namespace miot::io
