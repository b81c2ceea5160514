#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// it can be driven in-process by tests.
//
// Exit codes: 0 ok, 2 parse error, 3 validation error, 4 no peak,
// 5 numerical failure.

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "miot/analysis.hpp"
#include "miot/core.hpp"
#include "miot/eigenmodes.hpp"
#include "miot/io.hpp"
#include "miot/selection.hpp"
#include "miot/spectrum.hpp"
#include "miot/sweep.hpp"

namespace miot::cli {

enum ExitCode : int { exit_ok = 0, exit_parse = 2, exit_validation = 3, exit_no_peak = 4, exit_numeric = 5 };

inline int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonPositiveRate:
    case ErrorCode::NegativeRate:
    case ErrorCode::InvalidAtomCount:
    case ErrorCode::InconsistentZeeman:
    case ErrorCode::FluctuationTooLarge:
    case ErrorCode::InvalidGrid:
    case ErrorCode::InvalidQuantumNumbers:
    case ErrorCode::ZeroRaman: return exit_validation;
    case ErrorCode::NoPeak: return exit_no_peak;
    case ErrorCode::SingularSystem:
    case ErrorCode::StepTooLarge:
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::UnsupportedTransition:
    case ErrorCode::BracketFailure: return exit_numeric;
    }
    return exit_numeric;
}

namespace detail {

struct Common {
    std::string config;
    std::string format = "csv";
    std::string out_path;
};

struct Options {
    Common common;
    std::string dp_min, dp_max;
    std::size_t points = 4001;
    bool refine = false;
    std::string plot_path;
    std::string axis, range;
    unsigned jobs = 1;
};

inline void add_common(CLI::App* sub, Common& c, bool needs_config) {
    auto* cfg = sub->add_option("--config", c.config, "JSON parameter file");
    if (needs_config) cfg->required();
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", c.out_path, "write to PATH instead of stdout");
}

// Writes to --out when given, stdout otherwise.
inline void emit(const Common& c, std::ostream& out, const std::function<void(std::ostream&)>& body) {
    if (c.out_path.empty()) {
        body(out);
        return;
    }
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) throw io::ParseError("cannot open " + c.out_path + " for writing");
    body(file);
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw io::ParseError("cannot open " + path + " for writing");
    file << text;
}

inline std::string quote(const std::string& s) {
    std::string q = "'";
    for (char ch : s) q += ch == '\'' ? std::string("''") : std::string(1, ch);
    return q + "'";
}

inline std::string spectrum_plot_script(const std::string& csv) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 'delta_p / 2pi (Hz)'\n"
      << "set ylabel 'P_T'\n"
      << "set yrange [0:*]\n"
      << "plot " << quote(csv) << " using 1:2 with lines lw 1.5\n";
    return s.str();
}

inline std::string sweep_plot_script(const std::string& csv, const std::string& axis, bool log_x) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key top right\n"
      << (log_x ? "set logscale x\n" : "") << "set logscale y\n"
      << "set xlabel " << quote(axis) << "\n"
      << "set ylabel 'FWHM (Hz)'\n"
      << "plot " << quote(csv) << " using 12:5 with linespoints title 'exact', \\\n"
      << "     " << quote(csv) << " using 12:6 with lines dashtype 2 title 'approx'\n";
    return s.str();
}

inline PhysicalParams load_validated(const std::string& path) { return validate(io::load_params(path)); }

inline void warn_excitation(const PhysicalParams& p, const Spectrum& s, std::ostream& err) {
    const auto top = std::max_element(s.points.begin(), s.points.end(),
                                      [](const SpectrumPoint& a, const SpectrumPoint& b) { return a.P_T < b.P_T; });
    if (top == s.points.end()) return;
    const auto x = steady_state(build_system(p, top->delta_p));
    if (low_excitation_violated(x, p.N_atoms))
        err << "warning: excited fraction " << excitation_fraction(x, p.N_atoms)
            << " exceeds the low-excitation limit; bosonic treatment questionable\n";
}

inline void cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
    const PhysicalParams p = load_validated(o.common.config);
    Grid grid;
    grid.min = o.dp_min.empty() ? -0.8 * p.Omega_N : parse_frequency(o.dp_min);
    grid.max = o.dp_max.empty() ? 0.8 * p.Omega_N : parse_frequency(o.dp_max);
    grid.count = o.points;
    grid.refine = o.refine;
    const Spectrum s = sample(p, grid);
    warn_excitation(p, s, err);
    emit(o.common, out, [&](std::ostream& os) {
        if (o.common.format == "json") os << io::spectrum_to_json(s).dump(2) << '\n';
        else io::write_spectrum_csv(os, s);
    });
    if (!o.plot_path.empty()) write_file(o.plot_path, spectrum_plot_script(o.common.out_path));
}

inline void cmd_peak(const Options& o, std::ostream& out) {
    const PhysicalParams p = load_validated(o.common.config);
    std::optional<SearchWindow> window;
    if (!o.dp_min.empty() || !o.dp_max.empty()) {
        SearchWindow w = default_window(p);
        if (!o.dp_min.empty()) w.lo = parse_frequency(o.dp_min);
        if (!o.dp_max.empty()) w.hi = parse_frequency(o.dp_max);
        window = w;
    }
    const PeakReport r = analyze_peak(p, window);
    emit(o.common, out, [&](std::ostream& os) {
        if (o.common.format == "json") os << io::peak_to_json(r).dump(2) << '\n';
        else io::write_peak_csv(os, r);
    });
}

inline void cmd_pulling(const Options& o, std::ostream& out) {
    const PullingReport r = pulling(load_validated(o.common.config));
    emit(o.common, out, [&](std::ostream& os) {
        if (o.common.format == "json") os << io::pulling_to_json(r).dump(2) << '\n';
        else io::write_pulling_csv(os, r);
    });
}

inline void cmd_sweep(const Options& o, std::ostream& out) {
    const auto axis = find_axis(o.axis);
    if (!axis) throw io::ParseError("unknown sweep axis \"" + o.axis + "\"");
    SweepSpec spec;
    spec.axis = o.axis;
    spec.values = parse_range(o.range, axis->kind);
    spec.fixed = load_validated(o.common.config);
    const auto rows = run_sweep(spec, o.jobs);
    emit(o.common, out, [&](std::ostream& os) {
        if (o.common.format == "json") os << sweep_to_json(spec.axis, rows, axis->kind).dump(2) << '\n';
        else write_sweep_csv(os, rows, axis->kind);
    });
    if (!o.plot_path.empty())
        write_file(o.plot_path,
                   sweep_plot_script(o.common.out_path, o.axis, o.range.size() > 4 && o.range.ends_with(":log")));
}

inline void cmd_eigen(const Options& o, std::ostream& out) {
    const PhysicalParams p = load_validated(o.common.config);
    const auto d = decompose(p);
    const auto s = perturbative_dark(p);
    emit(o.common, out, [&](std::ostream& os) {
        if (o.common.format == "json") os << io::eigen_to_json(d, s).dump(2) << '\n';
        else io::write_eigen_csv(os, d);
    });
}

inline void cmd_selection(const Options& o, std::ostream& out) {
    const auto r = selection::verify_selection_rules();
    emit(o.common, out, [&](std::ostream& os) {
        if (o.common.format == "json") os << io::selection_to_json(r).dump(2) << '\n';
        else io::write_selection_csv(os, r);
    });
}

} // namespace detail

/// Runs one command line (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probe-transmission spectra and MIOT peak analysis of a Raman-dressed atom-cavity system", "miot"};
    app.require_subcommand(1);
    detail::Options o;

    auto* spectrum = app.add_subcommand("spectrum", "sample P_T on a probe-detuning grid");
    detail::add_common(spectrum, o.common, true);
    spectrum->add_option("--dp-min", o.dp_min, "lower detuning with unit, e.g. -4MHz (default -0.8 Omega_N)");
    spectrum->add_option("--dp-max", o.dp_max, "upper detuning with unit (default 0.8 Omega_N)");
    spectrum->add_option("--points", o.points, "grid points")->check(CLI::PositiveNumber);
    spectrum->add_flag("--refine", o.refine, "refine the grid around maxima");
    spectrum->add_option("--plot", o.plot_path, "also write a gnuplot script to PATH");

    auto* peak = app.add_subcommand("peak", "MIOT peak position, height and FWHM");
    detail::add_common(peak, o.common, true);
    peak->add_option("--dp-min", o.dp_min, "search-window lower edge");
    peak->add_option("--dp-max", o.dp_max, "search-window upper edge");

    auto* pull = app.add_subcommand("pulling", "pulling coefficients c_c, c_t, c_r");
    detail::add_common(pull, o.common, true);

    auto* sweep = app.add_subcommand("sweep", "analysis rows over a one-parameter range");
    detail::add_common(sweep, o.common, true);
    sweep->add_option("--axis", o.axis, "parameter to vary (g_alpha, Delta, eta, ...)")->required();
    sweep->add_option("--range", o.range, "lo:hi:n[:log], endpoints may carry units")->required();
    sweep->add_option("--jobs", o.jobs, "worker threads, 0 = all cores");
    sweep->add_option("--plot", o.plot_path, "also write a gnuplot script to PATH");

    auto* eigen = app.add_subcommand("eigen", "eigenmodes of the drive-free system");
    detail::add_common(eigen, o.common, true);

    auto* sel = app.add_subcommand("selection", "dipole selection-rule tables");
    detail::add_common(sel, o.common, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return exit_parse;
    }

    if (!o.plot_path.empty() && (o.common.out_path.empty() || o.common.format != "csv")) {
        err << "--plot needs --out PATH with csv format\n";
        return exit_parse;
    }

    try {
        if (spectrum->parsed()) detail::cmd_spectrum(o, out, err);
        else if (peak->parsed()) detail::cmd_peak(o, out);
        else if (pull->parsed()) detail::cmd_pulling(o, out);
        else if (sweep->parsed()) detail::cmd_sweep(o, out);
        else if (eigen->parsed()) detail::cmd_eigen(o, out);
        else detail::cmd_selection(o, out);
    } catch (const io::ParseError& e) {
        err << "ParseError: " << e.what() << '\n';
        return exit_parse;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.code());
    }
    return exit_ok;
}

} // namespace miot::cli
