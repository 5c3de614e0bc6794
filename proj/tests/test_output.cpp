#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "oemarray/errors.hpp"
#include "oemarray/output.hpp"

using namespace oem;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv layout") {
    CsvTable t({"omega", "value"});
    t.add_row({-1.0, 0.25});
    t.add_row({0.5, 2.0 / 3.0});
    CHECK(t.rows() == 2);
    CHECK(t.str() == "omega,value\n-1,0.25\n0.5,0.666666666667\n");
    CHECK_THROWS_AS(t.add_row({1.0}), ConfigError);
}

TEST_CASE("files are written byte for byte") {
    const auto dir = std::filesystem::temp_directory_path() / "oem_test_output";
    std::filesystem::create_directories(dir);
    CsvTable t({"a", "b"});
    t.add_row({1.0, 2.0});
    t.write(dir / "t.csv");
    CHECK(slurp(dir / "t.csv") == t.str());
    write_json(dir / "x.json", {{"k", 1}});
    CHECK(slurp(dir / "x.json") == "{\n  \"k\": 1\n}\n");
    write_text(dir / "x.txt", "hi\n");
    CHECK(slurp(dir / "x.txt") == "hi\n");
    std::filesystem::remove_all(dir);
}
