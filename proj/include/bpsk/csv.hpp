#pragma once

// Result table format shared by the sweep, Monte Carlo and plot commands.
//
//   # free-form metadata lines (skipped by readers)
//   alpha_sq,receiver,eta,nu,tau,xi,p_error,beta_opt,r_opt,gamma_opt,provenance,std_err
//   0.01,helstrom,1,0,1,1,0.45...,,,,analytic,
//
// Numbers are written in shortest round-trip form; absent values are empty fields.

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace bpsk::csv {

inline constexpr std::string_view kHeader =
    "alpha_sq,receiver,eta,nu,tau,xi,p_error,beta_opt,r_opt,gamma_opt,provenance,std_err";
inline constexpr int kFieldCount = 12;

struct CsvRow {
    double alpha_sq = 0.0;
    std::string receiver;
    double eta = 1.0;
    double nu = 0.0;
    double tau = 1.0;
    double xi = 1.0;
    double p_error = 0.0;
    std::optional<double> beta_opt;
    std::optional<double> r_opt;
    std::optional<double> gamma_opt;
    std::string provenance = "analytic";
    std::optional<double> std_err;
};

/// Malformed input; `line` is 1-based.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& source, int line, const std::string& what)
        : std::runtime_error(fmt::format("{}:{}: {}", source, line, what)), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

inline std::string format_row(const CsvRow& row) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", format_number(row.alpha_sq), row.receiver,
                       format_number(row.eta), format_number(row.nu), format_number(row.tau), format_number(row.xi),
                       format_number(row.p_error), format_optional(row.beta_opt), format_optional(row.r_opt),
                       format_optional(row.gamma_opt), row.provenance, format_optional(row.std_err));
}

/// Metadata lines are written verbatim after "# ". Line endings are always LF.
inline void write_table(std::ostream& out, std::span<const std::string> metadata, std::span<const CsvRow> rows) {
    for (const auto& m : metadata) out << "# " << m << '\n';
    out << kHeader << '\n';
    for (const auto& row : rows) out << format_row(row) << '\n';
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::optional<double> parse_number(std::string_view field) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

} // namespace detail

/// Parse a table. Lines starting with '#' and empty lines are skipped; the first other
/// line must be the exact header.
inline std::vector<CsvRow> read_table(std::istream& in, const std::string& source) {
    std::vector<CsvRow> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kHeader) throw FormatError(source, line_no, fmt::format("expected header '{}'", kHeader));
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (static_cast<int>(fields.size()) != kFieldCount) {
            throw FormatError(source, line_no, fmt::format("expected {} fields, found {}", kFieldCount, fields.size()));
        }
        auto required = [&](int i, const char* name) {
            const auto v = detail::parse_number(fields[i]);
            if (!v) throw FormatError(source, line_no, fmt::format("field '{}' is not a number: '{}'", name, fields[i]));
            return *v;
        };
        auto optional = [&](int i, const char* name) -> std::optional<double> {
            if (fields[i].empty()) return std::nullopt;
            return required(i, name);
        };
        CsvRow row;
        row.alpha_sq = required(0, "alpha_sq");
        row.receiver = std::string(fields[1]);
        if (row.receiver.empty()) throw FormatError(source, line_no, "empty receiver tag");
        row.eta = required(2, "eta");
        row.nu = required(3, "nu");
        row.tau = required(4, "tau");
        row.xi = required(5, "xi");
        row.p_error = required(6, "p_error");
        row.beta_opt = optional(7, "beta_opt");
        row.r_opt = optional(8, "r_opt");
        row.gamma_opt = optional(9, "gamma_opt");
        row.provenance = std::string(fields[10]);
        if (row.provenance.empty()) throw FormatError(source, line_no, "empty provenance");
        row.std_err = optional(11, "std_err");
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw FormatError(source, line_no, "missing header");
    return rows;
}

} // namespace bpsk::csv
