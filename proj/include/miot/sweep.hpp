#pragma once

// One-parameter sweeps producing one analysis row per point. Points are
// evaluated by a bounded worker pool and emitted in input order, so the
// output does not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "miot/analysis.hpp"
#include "miot/core.hpp"
#include "miot/io.hpp"
#include "miot/units.hpp"

namespace miot {

enum class AxisKind { frequency, dimensionless };

struct AxisInfo {
    std::string_view name;
    AxisKind kind;
};

inline constexpr AxisInfo sweep_axes[] = {
    {"omega_A", AxisKind::frequency},   {"Omega_N", AxisKind::frequency},
    {"Delta", AxisKind::frequency},     {"kappa", AxisKind::frequency},
    {"gamma", AxisKind::frequency},     {"Gamma_S", AxisKind::frequency},
    {"g_alpha", AxisKind::frequency},   {"g_beta", AxisKind::frequency},
    {"Delta_c", AxisKind::frequency},   {"Delta_t", AxisKind::frequency},
    {"Delta_r", AxisKind::frequency},   {"drive_amplitude", AxisKind::dimensionless},
    {"N_atoms", AxisKind::dimensionless}, {"eta", AxisKind::dimensionless},
};

inline std::optional<AxisInfo> find_axis(std::string_view name) {
    std::string_view key = name;
    if (key.substr(0, 6) == "fluct.") key.remove_prefix(6);
    for (const auto& a : sweep_axes)
        if (a.name == key) return a;
    return std::nullopt;
}

struct SweepSpec {
    std::string axis;
    std::vector<double> values; ///< angular frequencies for frequency axes
    PhysicalParams fixed;
};

namespace detail {

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw io::ParseError(std::string(what) + ": cannot parse \"" + std::string(s) + "\"");
    return v;
}

} // namespace detail

/// "2.5MHz", "-40kHz", "7" (Hz) -> angular frequency.
inline double parse_frequency(std::string_view text) {
    std::size_t split = text.size();
    while (split > 0 && std::isalpha(static_cast<unsigned char>(text[split - 1]))) --split;
    const std::string_view unit = text.substr(split);
    const auto scale = unit.empty() ? std::optional<double>{1.0} : unit_scale(unit);
    if (!scale) throw io::ParseError("unknown frequency unit \"" + std::string(unit) + "\"");
    return two_pi * *scale * detail::parse_double(text.substr(0, split), "frequency");
}

/// "lo:hi:n" or "lo:hi:n:log". Frequency axes accept unit suffixes on the
/// endpoints; the returned values are angular frequencies for those axes.
inline std::vector<double> parse_range(std::string_view text, AxisKind kind) {
    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        const std::size_t colon = text.find(':', start);
        parts.push_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3 && parts.size() != 4) throw io::ParseError("range must be lo:hi:n[:log]");
    const bool log = parts.size() == 4;
    if (log && parts[3] != "log" && parts[3] != "lin") throw io::ParseError("range scale must be log or lin");
    const bool use_log = log && parts[3] == "log";

    const auto endpoint = [&](std::string_view s) {
        return kind == AxisKind::frequency ? parse_frequency(s) : detail::parse_double(s, "range endpoint");
    };
    const double lo = endpoint(parts[0]), hi = endpoint(parts[1]);
    const double count = detail::parse_double(parts[2], "range count");
    if (!(count >= 1) || count != std::floor(count) || count > 1e7)
        throw io::ParseError("range count must be a positive integer");
    if (use_log && !(lo > 0 && hi > 0)) throw io::ParseError("log range needs positive endpoints");

    const auto n = static_cast<std::size_t>(count);
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        values[k] = use_log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
        if (k + 1 == n && n > 1) values[k] = hi;
    }
    return values;
}

/// Copy of `p` with the named parameter set to `value`. For g_alpha/g_beta
/// the phase of the fixed value is kept; "eta" adjusts |g_alpha| at fixed g_beta.
inline PhysicalParams apply_axis(PhysicalParams p, std::string_view axis, double value) {
    const auto keep_phase = [](complex g, double magnitude) {
        return g == complex{} ? complex{magnitude} : magnitude * g / std::abs(g);
    };
    if (axis.substr(0, 6) == "fluct.") axis.remove_prefix(6);
    if (axis == "omega_A") p.omega_A = value;
    else if (axis == "Omega_N") p.Omega_N = value;
    else if (axis == "Delta") {
        p.Delta = value;
        p.mu.reset();
        p.B.reset();
    } else if (axis == "kappa") p.kappa = value;
    else if (axis == "gamma") p.gamma = value;
    else if (axis == "Gamma_S") p.Gamma_S = value;
    else if (axis == "g_alpha") p.g_alpha = keep_phase(p.g_alpha, value);
    else if (axis == "g_beta") p.g_beta = keep_phase(p.g_beta, value);
    else if (axis == "Delta_c") p.fluct.Delta_c = value;
    else if (axis == "Delta_t") p.fluct.Delta_t = value;
    else if (axis == "Delta_r") p.fluct.Delta_r = value;
    else if (axis == "drive_amplitude") p.drive_amplitude = value;
    else if (axis == "N_atoms") p.N_atoms = static_cast<std::int64_t>(std::llround(value));
    else if (axis == "eta") {
        if (!(value > 0.0 && value <= 1.0)) throw Error(ErrorCode::NonPositiveRate, "eta must lie in (0, 1]");
        if (p.g_beta == complex{}) throw Error(ErrorCode::ZeroRaman, "eta axis needs a nonzero g_beta");
        p.g_alpha = keep_phase(p.g_alpha, std::abs(p.g_beta) * std::sqrt(1.0 / value - 1.0));
    } else
        throw io::ParseError("unknown sweep axis \"" + std::string(axis) + "\"");
    return p;
}

struct SweepRow {
    double g_alpha = 0.0, g_beta = 0.0, Delta = 0.0, eta = 1.0;
    double fwhm_exact = 0.0, fwhm_approx = 0.0;
    double height_exact = 0.0, height_approx = 0.0;
    double c_c = 0.0, c_t = 0.0, c_r = 0.0;
    double axis_value = 0.0;
    std::string error; ///< empty when every exact quantity was obtained
};

inline SweepRow evaluate_point(const PhysicalParams& raw, double axis_value) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    SweepRow row;
    row.axis_value = axis_value;
    row.fwhm_exact = row.height_exact = row.c_c = row.c_t = row.c_r = nan;
    row.fwhm_approx = row.height_approx = nan;
    try {
        const PhysicalParams p = validate(raw);
        row.g_alpha = std::abs(p.g_alpha);
        row.g_beta = std::abs(p.g_beta);
        row.Delta = p.zeeman();
        row.eta = p.derived->eta;
        row.fwhm_approx = width_approx(p);
        row.height_approx = height_approx(p);
        const Peak peak = find_peak(p);
        row.height_exact = peak.height;
        row.fwhm_exact = fwhm(p, peak);
        const PullingReport pr = pulling(p);
        row.c_c = pr.c_c.value;
        row.c_t = pr.c_t.value;
        row.c_r = pr.c_r.value;
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

/// Evaluates every point with up to `jobs` threads (0 = hardware concurrency);
/// rows come back in the order of spec.values.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs = 1) {
    const std::size_t n = spec.values.size();
    std::vector<SweepRow> rows(n);
    if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) {
            try {
                rows[k] = evaluate_point(apply_axis(spec.fixed, spec.axis, spec.values[k]), spec.values[k]);
            } catch (const Error& e) {
                rows[k] = SweepRow{};
                rows[k].axis_value = spec.values[k];
                rows[k].error = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, AxisKind kind) {
    out << "g_alpha_Hz,g_beta_Hz,Delta_Hz,eta,fwhm_exact_Hz,fwhm_approx_Hz,height_exact,height_approx,c_c,c_t,c_r,"
           "axis_value\n";
    for (const auto& r : rows)
        io::write_csv_row(out, {to_hz(r.g_alpha), to_hz(r.g_beta), to_hz(r.Delta), r.eta, to_hz(r.fwhm_exact),
                                to_hz(r.fwhm_approx), r.height_exact, r.height_approx, r.c_c, r.c_t, r.c_r,
                                kind == AxisKind::frequency ? to_hz(r.axis_value) : r.axis_value});
}

inline io::json sweep_to_json(const std::string& axis, const std::vector<SweepRow>& rows, AxisKind kind) {
    // NaN has no JSON spelling; missing quantities become null.
    const auto num = [](double v) { return std::isfinite(v) ? io::json(v) : io::json(nullptr); };
    io::json arr = io::json::array();
    for (const auto& r : rows) {
        io::json row{{"axis_value", num(kind == AxisKind::frequency ? to_hz(r.axis_value) : r.axis_value)},
                     {"g_alpha_Hz", num(to_hz(r.g_alpha))},
                     {"g_beta_Hz", num(to_hz(r.g_beta))},
                     {"Delta_Hz", num(to_hz(r.Delta))},
                     {"eta", num(r.eta)},
                     {"fwhm_exact_Hz", num(to_hz(r.fwhm_exact))},
                     {"fwhm_approx_Hz", num(to_hz(r.fwhm_approx))},
                     {"height_exact", num(r.height_exact)},
                     {"height_approx", num(r.height_approx)},
                     {"c_c", num(r.c_c)},
                     {"c_t", num(r.c_t)},
                     {"c_r", num(r.c_r)}};
        if (!r.error.empty()) row["error"] = r.error;
        arr.push_back(row);
    }
    return {{"axis", axis}, {"rows", arr}};
}

} // namespace miot
