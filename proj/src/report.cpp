#include "ri2d/report.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace ri2d {

void ResultTable::add_meta(const std::string& key, const std::string& value)
{
    meta.emplace_back(key, value);
}

void ResultTable::add_row(std::vector<std::string> row)
{
    if (row.size() != columns.size())
        throw std::invalid_argument("ResultTable: row width mismatch");
    rows.push_back(std::move(row));
}

ReportFormat parse_format(const std::string& name)
{
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    if (name == "plotdata") return ReportFormat::plotdata;
    throw std::invalid_argument("unknown report format: " + name);
}

const char* format_extension(ReportFormat fmt)
{
    switch (fmt) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::plotdata: return "dat";
    }
    throw std::logic_error("format_extension: bad format");
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

std::string json_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out += buf;
            } else {
                out.push_back(c);
            }
        }
    }
    return out;
}

bool looks_numeric(const std::string& s)
{
    if (s.empty()) return false;
    double v;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::string json_value(const std::string& s)
{
    if (looks_numeric(s)) return s;
    if (s == "true" || s == "false") return s;
    return "\"" + json_escape(s) + "\"";
}

void emit_csv(const ResultTable& t, std::ostream& os)
{
    for (const auto& [k, v] : t.meta) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << csv_quote(t.columns[i]);
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << csv_quote(row[i]);
        os << "\n";
    }
}

void emit_json(const ResultTable& t, std::ostream& os)
{
    os << "{\n  \"meta\": {";
    for (std::size_t i = 0; i < t.meta.size(); ++i) {
        os << (i ? ", " : "") << "\"" << json_escape(t.meta[i].first)
           << "\": " << json_value(t.meta[i].second);
    }
    os << "},\n  \"columns\": [";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? ", " : "") << "\"" << json_escape(t.columns[i]) << "\"";
    os << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << (r ? ",\n    " : "\n    ") << "[";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i)
            os << (i ? ", " : "") << json_value(t.rows[r][i]);
        os << "]";
    }
    os << (t.rows.empty() ? "]" : "\n  ]") << "\n}\n";
}

void emit_plotdata(const ResultTable& t, std::ostream& os)
{
    for (const auto& [k, v] : t.meta) os << "# " << k << "=" << v << "\n";
    os << "#";
    for (const auto& c : t.columns) os << " " << c;
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? " " : "") << (row[i].empty() ? "nan" : row[i]);
        os << "\n";
    }
}

} // namespace

void emit_report(const ResultTable& table, ReportFormat fmt, std::ostream& os)
{
    switch (fmt) {
    case ReportFormat::csv: emit_csv(table, os); return;
    case ReportFormat::json: emit_json(table, os); return;
    case ReportFormat::plotdata: emit_plotdata(table, os); return;
    }
}

std::string write_report(const ResultTable& table, ReportFormat fmt,
                         const std::string& dir, const std::string& name)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string path =
        (fs::path(dir) / (name + "." + format_extension(fmt))).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_report: cannot open " + path);
    emit_report(table, fmt, os);
    return path;
}

} // namespace ri2d
