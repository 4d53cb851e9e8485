#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "logshot/io.hpp"

using namespace logshot;

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace

TEST_CASE("format_double round-trips exactly", "[io]") {
  for (double v : {0.0, 1.5, 1.0 / 3.0, 1e300, -2.5e-17, 0.1, 12345.6789}) {
    REQUIRE(parse_double(io::format_double(v)) == v);
  }
  // Shortest form: simple values stay simple.
  REQUIRE(io::format_double(1.5) == "1.5");
  REQUIRE(io::format_double(0.0) == "0");
}

TEST_CASE("csv_row joins cells with commas", "[io]") {
  REQUIRE(io::csv_row({"a", "b", "c"}) == "a,b,c\n");
  REQUIRE(io::csv_row({"lone"}) == "lone\n");
}

TEST_CASE("atomic writes land completely or not at all", "[io]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "logshot_io_test";
  fs::create_directories(dir);
  const fs::path target = dir / "out.csv";

  io::write_file_atomic(target, "x,y\n1,2\n");
  {
    std::ifstream in(target);
    std::stringstream ss;
    ss << in.rdbuf();
    REQUIRE(ss.str() == "x,y\n1,2\n");
  }
  // Overwrite works and leaves no temp file behind.
  io::write_file_atomic(target, "replaced\n");
  {
    std::ifstream in(target);
    std::stringstream ss;
    ss << in.rdbuf();
    REQUIRE(ss.str() == "replaced\n");
  }
  REQUIRE_FALSE(fs::exists(target.string() + ".tmp"));

  // A destination whose directory does not exist fails without creating
  // anything.
  const fs::path bad = dir / "missing" / "out.csv";
  REQUIRE_THROWS_AS(io::write_file_atomic(bad, "data"), std::runtime_error);
  REQUIRE_FALSE(fs::exists(bad));
  fs::remove_all(dir);
}
