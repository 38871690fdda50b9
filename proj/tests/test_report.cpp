#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ri2d/report.hpp"

using namespace ri2d;

namespace {

ResultTable sample_table()
{
    ResultTable t;
    t.add_meta("experiment", "demo");
    t.add_meta("seed", "7");
    t.columns = {"name", "value"};
    t.add_row({"alpha, beta", "1.5"});
    t.add_row({"plain", "2"});
    return t;
}

std::string emit(const ResultTable& t, ReportFormat f)
{
    std::ostringstream os;
    emit_report(t, f, os);
    return os.str();
}

} // namespace

TEST_CASE("csv output quotes only when needed")
{
    CHECK(emit(sample_table(), ReportFormat::csv) ==
          "# experiment=demo\n# seed=7\nname,value\n\"alpha, beta\",1.5\nplain,2\n");
}

TEST_CASE("json output types numeric strings as numbers")
{
    CHECK(emit(sample_table(), ReportFormat::json) ==
          "{\n  \"meta\": {\"experiment\": \"demo\", \"seed\": 7},\n"
          "  \"columns\": [\"name\", \"value\"],\n"
          "  \"rows\": [\n    [\"alpha, beta\", 1.5],\n    [\"plain\", 2]\n  ]\n}\n");
}

TEST_CASE("plotdata output is whitespace separated with a comment header")
{
    CHECK(emit(sample_table(), ReportFormat::plotdata) ==
          "# experiment=demo\n# seed=7\n# name value\nalpha, beta 1.5\nplain 2\n");
}

TEST_CASE("round-trip shortest representation of doubles")
{
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_u64(18446744073709551615ULL) == "18446744073709551615");
}

TEST_CASE("format parsing and extensions")
{
    CHECK(parse_format("csv") == ReportFormat::csv);
    CHECK(parse_format("plotdata") == ReportFormat::plotdata);
    CHECK_THROWS(parse_format("xml"));
    CHECK(std::string(format_extension(ReportFormat::plotdata)) == "dat");
}

TEST_CASE("write_report creates the directory and file")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ri2d_report_test";
    fs::remove_all(dir);
    const std::string path =
        write_report(sample_table(), ReportFormat::csv, dir.string(), "demo");
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == emit(sample_table(), ReportFormat::csv));
    fs::remove_all(dir);
}

TEST_CASE("row width is validated")
{
    ResultTable t;
    t.columns = {"a", "b"};
    CHECK_THROWS(t.add_row({"only one"}));
}
