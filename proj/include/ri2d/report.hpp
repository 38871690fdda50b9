#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace ri2d {

/// Tabular experiment output plus ordered metadata; serialization is
/// deterministic in all formats so reruns are byte-comparable.
struct ResultTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_meta(const std::string& key, const std::string& value);
    void add_row(std::vector<std::string> row);
};

enum class ReportFormat { csv, json, plotdata };

ReportFormat parse_format(const std::string& name);
const char* format_extension(ReportFormat fmt);

/// Shortest decimal form that round-trips the double.
std::string format_double(double v);
std::string format_u64(std::uint64_t v);

void emit_report(const ResultTable& table, ReportFormat fmt, std::ostream& os);

/// Writes <dir>/<name>.<ext>; creates the directory if needed and returns
/// the path.
std::string write_report(const ResultTable& table, ReportFormat fmt,
                         const std::string& dir, const std::string& name);

} // namespace ri2d
