#pragma once

// Implementations behind the `bpsk` executable. Each command writes its payload to a file
// (or `out` when no path is given), diagnostics to `err`, and returns the process exit code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "bpsk/csv.hpp"
#include "bpsk/errors.hpp"
#include "bpsk/montecarlo.hpp"
#include "bpsk/optimizer.hpp"
#include "bpsk/receivers.hpp"
#include "bpsk/svg_plot.hpp"
#include "bpsk/types.hpp"

namespace bpsk::cli {

inline constexpr std::string_view kVersion = "1.0.0";

enum ExitCode : int {
    kSuccess = 0,
    kVerifyFailed = 1,
    kPartialSweep = 2,
    kOptimizerFailure = 3,
    kInputError = 4,
};

enum class Scale { log, linear };

struct SweepSpec {
    double alpha_sq_min = 1e-2;
    double alpha_sq_max = 10.0;
    int points = 60;
    Scale scale = Scale::log;
    std::vector<receivers::ReceiverTag> receivers;
    DetectorModel detector{};
    std::string output_path; ///< empty: write to the command's output stream

    void validate() const {
        if (!(alpha_sq_min > 0.0) || !(alpha_sq_max > 0.0) || !std::isfinite(alpha_sq_max)) {
            throw InvalidInput(fmt::format("alpha^2 range must be positive, got [{}, {}]", alpha_sq_min, alpha_sq_max));
        }
        if (!(alpha_sq_min < alpha_sq_max)) {
            throw InvalidInput(fmt::format("need alpha-sq-min < alpha-sq-max, got [{}, {}]", alpha_sq_min, alpha_sq_max));
        }
        if (points < 2) throw InvalidInput(fmt::format("need at least 2 points, got {}", points));
        detector.validate();
    }
};

/// Receivers of the ideal-detector comparison.
inline std::vector<receivers::ReceiverTag> fig3_receivers() {
    using receivers::ReceiverTag;
    return {ReceiverTag::helstrom, ReceiverTag::homodyne, ReceiverTag::kennedy, ReceiverTag::type1, ReceiverTag::type2};
}

/// Receivers of the imperfect-detector comparison.
inline std::vector<receivers::ReceiverTag> fig4_receivers() {
    using receivers::ReceiverTag;
    return {ReceiverTag::homodyne, ReceiverTag::kennedy, ReceiverTag::kennedy_raw, ReceiverTag::type2_imperfect};
}

inline SweepSpec fig3_spec() {
    SweepSpec s;
    s.receivers = fig3_receivers();
    return s;
}

inline SweepSpec fig4_spec() {
    SweepSpec s;
    s.receivers = fig4_receivers();
    s.detector = DetectorModel::practical();
    return s;
}

/// Grid endpoints are reproduced exactly; log grids are geometric.
inline std::vector<double> make_grid(const SweepSpec& spec) {
    spec.validate();
    std::vector<double> grid(static_cast<std::size_t>(spec.points));
    const int last = spec.points - 1;
    for (int i = 0; i <= last; ++i) {
        const double t = static_cast<double>(i) / last;
        grid[i] = spec.scale == Scale::log
                      ? std::exp(std::log(spec.alpha_sq_min) + t * (std::log(spec.alpha_sq_max) - std::log(spec.alpha_sq_min)))
                      : spec.alpha_sq_min + t * (spec.alpha_sq_max - spec.alpha_sq_min);
    }
    grid.front() = spec.alpha_sq_min;
    grid.back() = spec.alpha_sq_max;
    return grid;
}

inline std::vector<receivers::ReceiverTag> parse_receiver_list(std::string_view list) {
    std::vector<receivers::ReceiverTag> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto comma = list.find(',', start);
        if (comma == std::string_view::npos) comma = list.size();
        const auto name = list.substr(start, comma - start);
        if (!name.empty()) {
            const auto tag = receivers::parse_receiver(name);
            if (!tag) throw InvalidInput(fmt::format("unknown receiver '{}'", name));
            if (std::find(out.begin(), out.end(), *tag) == out.end()) out.push_back(*tag);
        }
        start = comma + 1;
    }
    return out;
}

/// A scalar such as "0.5", "pi", "2*pi", "pi/6" or "2*pi/3".
inline double parse_scalar(std::string_view text) {
    auto number = [&](std::string_view s) {
        const auto v = csv::detail::parse_number(s);
        if (!v) throw InvalidInput(fmt::format("cannot parse number '{}'", text));
        return *v;
    };
    const auto pi_pos = text.find("pi");
    if (pi_pos == std::string_view::npos) return number(text);
    double value = std::numbers::pi;
    auto head = text.substr(0, pi_pos);
    auto tail = text.substr(pi_pos + 2);
    if (!head.empty()) {
        if (head.back() != '*') throw InvalidInput(fmt::format("cannot parse number '{}'", text));
        value *= number(head.substr(0, head.size() - 1));
    }
    if (!tail.empty()) {
        if (tail.front() != '/') throw InvalidInput(fmt::format("cannot parse number '{}'", text));
        value /= number(tail.substr(1));
    }
    return value;
}

/// Grid syntax: "start:stop:count" (inclusive, evenly spaced) or a comma-separated list.
inline std::vector<double> parse_grid(std::string_view text) {
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw InvalidInput(fmt::format("grid '{}' must be start:stop:count", text));
        const double a = parse_scalar(text.substr(0, c1));
        const double b = parse_scalar(text.substr(c1 + 1, c2 - c1 - 1));
        const double n = parse_scalar(text.substr(c2 + 1));
        if (!(n >= 1.0) || n != std::floor(n)) throw InvalidInput(fmt::format("grid count must be a positive integer in '{}'", text));
        const int count = static_cast<int>(n);
        if (count == 1) return {a};
        for (int i = 0; i < count; ++i) out.push_back(i == count - 1 ? b : a + (b - a) * i / (count - 1));
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        out.push_back(parse_scalar(text.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

inline std::vector<double> default_r_grid() { return parse_grid("0:8:9"); }
inline std::vector<double> default_phi_grid() { return parse_grid("0:pi:7"); }

namespace detail {

/// `path` opened for writing, or `fallback` when the path is empty or "-".
inline std::ostream& sink(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path, std::ios::binary | std::ios::trunc);
    if (!file) throw InvalidInput(fmt::format("cannot open '{}' for writing", path));
    return file;
}

inline std::string detector_line(const DetectorModel& d) {
    return fmt::format("detector eta={} nu={} tau={} xi={}", csv::format_number(d.eta), csv::format_number(d.nu),
                       csv::format_number(d.tau), csv::format_number(d.xi));
}

inline std::string grid_line(const SweepSpec& s) {
    return fmt::format("grid alpha_sq=[{}, {}] points={} scale={}", csv::format_number(s.alpha_sq_min),
                       csv::format_number(s.alpha_sq_max), s.points, s.scale == Scale::log ? "log" : "linear");
}

inline csv::CsvRow to_row(double alpha_sq, const receivers::ReceiverResult& r, const DetectorModel& det) {
    csv::CsvRow row;
    row.alpha_sq = alpha_sq;
    row.receiver = std::string(receivers::to_string(r.receiver));
    row.eta = det.eta;
    row.nu = det.nu;
    row.tau = det.tau;
    row.xi = det.xi;
    row.p_error = r.p_error;
    row.beta_opt = r.beta_opt;
    row.r_opt = r.r_opt;
    row.gamma_opt = r.gamma_opt;
    row.provenance = std::string(receivers::to_string(r.provenance));
    return row;
}

/// Run `task(i)` for i in [0, n) on up to hardware_concurrency threads.
template <class Task>
void parallel_for(std::size_t n, Task&& task) {
    if (n == 0) return;
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) task(i);
        });
    }
}

} // namespace detail

struct SweepOutcome {
    std::vector<csv::CsvRow> rows;
    std::vector<std::string> warnings; ///< one per omitted row, grid order
};

/// Evaluate every (grid point, receiver) pair. Solver failures omit the row and add a
/// warning; configuration errors (e.g. a receiver that does not support the detector) throw.
inline SweepOutcome run_sweep(const SweepSpec& spec) {
    const auto grid = make_grid(spec);
    struct PointResult {
        std::vector<csv::CsvRow> rows;
        std::vector<std::string> warnings;
        std::exception_ptr fatal;
    };
    std::vector<PointResult> results(grid.size());
    detail::parallel_for(grid.size(), [&](std::size_t i) {
        auto& res = results[i];
        const auto ensemble = BinaryEnsemble::from_alpha_sq(grid[i]);
        for (auto tag : spec.receivers) {
            try {
                res.rows.push_back(detail::to_row(grid[i], receivers::evaluate(tag, ensemble, spec.detector), spec.detector));
            } catch (const ConvergenceError& e) {
                res.warnings.push_back(fmt::format("alpha_sq={} receiver={}: {}", csv::format_number(grid[i]), receivers::to_string(tag), e.what()));
            } catch (const BracketError& e) {
                res.warnings.push_back(fmt::format("alpha_sq={} receiver={}: {}", csv::format_number(grid[i]), receivers::to_string(tag), e.what()));
            } catch (...) {
                res.fatal = std::current_exception();
                return;
            }
        }
    });
    SweepOutcome out;
    for (auto& r : results) {
        if (r.fatal) std::rethrow_exception(r.fatal);
        out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
        out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
    }
    return out;
}

inline int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err) {
    SweepOutcome outcome;
    try {
        outcome = run_sweep(spec);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return kOptimizerFailure;
    }
    for (const auto& w : outcome.warnings) err << "warning: row omitted, " << w << '\n';
    const std::vector<std::string> meta{fmt::format("bpsk sweep {}", kVersion), detail::grid_line(spec),
                                        detail::detector_line(spec.detector)};
    try {
        std::ofstream file;
        csv::write_table(detail::sink(spec.output_path, file, out), meta, outcome.rows);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return outcome.warnings.empty() ? kSuccess : kPartialSweep;
}

/// Solved receiver parameters as key=value lines.
inline int cmd_params(double alpha_sq, double eta, std::ostream& out, std::ostream& err) {
    if (!(alpha_sq > 0.0) || !std::isfinite(alpha_sq) || !(eta > 0.0 && eta <= 1.0)) {
        err << fmt::format("error: need alpha_sq > 0 and eta in (0, 1], got alpha_sq={} eta={}\n", alpha_sq, eta);
        return kInputError;
    }
    const double alpha = std::sqrt(alpha_sq);
    out << "alpha_sq=" << csv::format_number(alpha_sq) << '\n' << "eta=" << csv::format_number(eta) << '\n';
    try {
        const auto g = optimizer::solve_type2_gamma(alpha, eta);
        out << "type2.gamma_opt=" << csv::format_number(g.value) << '\n';
        out << fmt::format("type2.residual={:.3e}\n", g.residual);
        out << "type2.p_error=" << csv::format_number(closed_forms::displacement_error(alpha, g.value, {eta, 0.0, 1.0, 1.0})) << '\n';

        const auto t1 = optimizer::solve_type1_params(alpha, eta);
        const auto op = closed_forms::to_operator_parameters(t1.beta, t1.r);
        out << "type1.beta_opt=" << csv::format_number(t1.beta) << '\n';
        out << "type1.r_opt=" << csv::format_number(t1.r) << '\n';
        out << fmt::format("type1.residual_r={:.3e}\n", std::abs(t1.residuals.squeezing));
        out << fmt::format("type1.residual_beta={:.3e}\n", std::abs(t1.residuals.displacement));
        out << "type1.p_error=" << csv::format_number(t1.p_error) << '\n';
        out << "type1.operator_displacement=" << csv::format_number(op.displacement) << '\n';
        out << "type1.operator_squeezing=" << csv::format_number(op.squeezing) << '\n';
    } catch (const ConvergenceError& e) {
        err << fmt::format("error: {} (best point ({}, {}), residual {:.3e})\n", e.what(), e.best_point().first,
                           e.best_point().second, e.best_residual());
        return kOptimizerFailure;
    } catch (const BracketError& e) {
        err << fmt::format("error: {} (bracket [{}, {}])\n", e.what(), e.lo(), e.hi());
        return kOptimizerFailure;
    }
    return kSuccess;
}

struct VerifySpec {
    double alpha_sq = 0.25;
    std::vector<double> r_grid = default_r_grid();
    std::vector<double> phi_grid = default_phi_grid();
    std::string output_path; ///< landscape CSV; empty writes it to `out` before the verdict
};

inline int cmd_verify_gaussian(const VerifySpec& spec, std::ostream& out, std::ostream& err) {
    optimizer::LandscapeReport report;
    const auto ensemble = BinaryEnsemble::from_alpha_sq(spec.alpha_sq);
    try {
        if (!(spec.alpha_sq >= 0.0)) throw InvalidInput(fmt::format("alpha_sq must be >= 0, got {}", spec.alpha_sq));
        for (double r : spec.r_grid) {
            if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidInput(fmt::format("r grid values must be finite and >= 0, got {}", r));
        }
        for (double phi : spec.phi_grid) {
            if (!std::isfinite(phi)) throw InvalidInput("phi grid values must be finite");
        }
        report = optimizer::verify_gaussian_optimum(ensemble, spec.r_grid, spec.phi_grid);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        std::ofstream file;
        auto& sink = detail::sink(spec.output_path, file, out);
        sink << "r,phi,e,p_error\n";
        for (const auto& p : report.points) {
            sink << csv::format_number(p.r) << ',' << csv::format_number(p.phi) << ',' << csv::format_number(p.e) << ','
                 << csv::format_number(p.p_error) << '\n';
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    const auto& best = report.points[report.argmin];
    out << fmt::format("argmin r={} phi={} p_error={}\n", csv::format_number(best.r), csv::format_number(best.phi),
                       csv::format_number(best.p_error));
    out << "homodyne_limit=" << csv::format_number(receivers::homodyne_limit(ensemble)) << '\n';
    if (report.degenerate) {
        out << "argmin at (r_max, phi=0): DEGENERATE\n";
        out << "note: the r grid has a single value, so it cannot separate measurements\n";
        return kSuccess;
    }
    out << "argmin at (r_max, phi=0): " << (report.optimum_at_homodyne ? "PASS" : "FAIL") << '\n';
    return report.optimum_at_homodyne ? kSuccess : kVerifyFailed;
}

struct MonteCarloSpec {
    SweepSpec sweep;
    std::uint64_t seed = 1;
    std::uint64_t trials = 1'000'000;
};

inline montecarlo::GammaRule gamma_rule_for(receivers::ReceiverTag tag, const DetectorModel& det) {
    using receivers::ReceiverTag;
    switch (tag) {
    case ReceiverTag::type2_imperfect: return montecarlo::GammaRule::optimal;
    case ReceiverTag::kennedy: return montecarlo::GammaRule::kennedy;
    case ReceiverTag::kennedy_raw: return montecarlo::GammaRule::kennedy_raw;
    case ReceiverTag::type2:
        if (!det.lossless_interference()) throw UnsupportedConfiguration("type2 assumes tau = xi = 1");
        return montecarlo::GammaRule::optimal;
    default:
        throw UnsupportedConfiguration(
            fmt::format("receiver '{}' has no click-level simulation", receivers::to_string(tag)));
    }
}

inline int cmd_montecarlo(const MonteCarloSpec& spec, std::ostream& out, std::ostream& err) {
    std::vector<std::vector<montecarlo::McEstimate>> per_receiver;
    std::vector<double> grid;
    try {
        grid = make_grid(spec.sweep);
        if (spec.trials < 1) throw InvalidInput("at least one trial required");
        montecarlo::McConfig base;
        base.trials = spec.trials;
        base.seed = spec.seed;
        base.detector = spec.sweep.detector;
        for (auto tag : spec.sweep.receivers) {
            per_receiver.push_back(montecarlo::sweep_montecarlo(grid, base, gamma_rule_for(tag, spec.sweep.detector)));
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return kOptimizerFailure;
    }

    std::vector<csv::CsvRow> rows;
    const auto& det = spec.sweep.detector;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t k = 0; k < spec.sweep.receivers.size(); ++k) {
            const auto& est = per_receiver[k][i];
            csv::CsvRow row;
            row.alpha_sq = grid[i];
            row.receiver = std::string(receivers::to_string(spec.sweep.receivers[k]));
            row.eta = det.eta;
            row.nu = det.nu;
            row.tau = det.tau;
            row.xi = det.xi;
            row.p_error = est.p_hat;
            row.gamma_opt = est.gamma;
            row.provenance = "montecarlo";
            row.std_err = est.std_err;
            rows.push_back(std::move(row));
        }
    }
    const std::vector<std::string> meta{fmt::format("bpsk montecarlo {}", kVersion),
                                        fmt::format("rng_id {}", montecarlo::kRngId),
                                        fmt::format("seed {} trials {}", spec.seed, spec.trials),
                                        detail::grid_line(spec.sweep), detail::detector_line(det)};
    try {
        std::ofstream file;
        csv::write_table(detail::sink(spec.sweep.output_path, file, out), meta, rows);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kSuccess;
}

/// One series per (receiver, provenance) in order of first appearance, points sorted by alpha^2.
inline std::vector<svg::Series> group_rows(const std::vector<csv::CsvRow>& rows) {
    std::vector<svg::Series> series;
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& row : rows) {
        const std::pair key{row.receiver, row.provenance};
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            svg::Series s;
            s.label = row.provenance == "analytic" ? row.receiver : fmt::format("{} ({})", row.receiver, row.provenance);
            s.dashed = row.provenance != "analytic";
            series.push_back(std::move(s));
            it = keys.end() - 1;
        }
        series[static_cast<std::size_t>(it - keys.begin())].points.emplace_back(row.alpha_sq, row.p_error);
    }
    for (auto& s : series) {
        std::stable_sort(s.points.begin(), s.points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return series;
}

inline int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& svg_path, std::ostream& out,
                    std::ostream& err) {
    std::vector<csv::CsvRow> rows;
    for (const auto& path : csv_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            err << fmt::format("error: cannot open '{}'\n", path);
            return kInputError;
        }
        try {
            auto part = csv::read_table(in, path);
            rows.insert(rows.end(), part.begin(), part.end());
        } catch (const csv::FormatError& e) {
            err << "error: malformed CSV at " << e.what() << '\n';
            return kInputError;
        }
    }
    const std::string svg_text = svg::render_loglog(group_rows(rows));
    try {
        std::ofstream file;
        detail::sink(svg_path, file, out) << svg_text;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kSuccess;
}

} // namespace bpsk::cli
