#include <cstring>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "dynheat/errors.hpp"
#include "dynheat/field_io.hpp"

using namespace dynheat;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "dynheat_field_io_test";
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

FieldTrajectory sample_trajectory(bool with_trace) {
  FieldTrajectory f;
  const std::vector<CellAxis> tangential{CellAxis{-1.0, 0.5, 4}};
  const CellAxis height{0.0, 0.25, 3};
  for (double t : {0.1, 0.5}) {
    SampledField s{tangential, height, {}};
    for (std::size_t i = 0; i < s.size(); ++i) s.values.push_back(t * 100.0 + static_cast<double>(i) / 7.0);
    f.times.push_back(t);
    f.values.push_back(s);
    if (with_trace) f.trace.push_back(SampledBoundaryField{tangential, {t, -t, 2 * t, 1e-300}});
  }
  return f;
}

}  // namespace

TEST_CASE("dump round-trip is bit exact") {
  const fs::path dir = scratch_dir();
  const FieldTrajectory f = sample_trajectory(true);
  write_field_dump(dir / "u", "u", f);
  CHECK(fs::exists(dir / "u.json"));
  CHECK(fs::exists(dir / "u.bin"));
  CHECK(fs::exists(dir / "u_trace.json"));
  CHECK(fs::file_size(dir / "u.bin") == 2 * 12 * sizeof(double));

  const FieldTrajectory g = read_field_dump(dir / "u");
  CHECK(g.times == f.times);
  REQUIRE(g.values.size() == 2);
  REQUIRE(g.trace.size() == 2);
  for (std::size_t n = 0; n < 2; ++n) {
    CHECK(g.values[n].values == f.values[n].values);
    CHECK(g.trace[n].values == f.trace[n].values);
    CHECK(g.values[n].height.n == 3);
    CHECK(g.values[n].tangential.front().lo == -1.0);
    CHECK(g.values[n].tangential.front().h == 0.5);
  }
  fs::remove_all(dir);
}

TEST_CASE("header and binary layout") {
  const fs::path dir = scratch_dir();
  write_field_dump(dir / "v", "v", sample_trajectory(false));
  CHECK_FALSE(fs::exists(dir / "v_trace.json"));

  std::ifstream hj(dir / "v.json");
  const nlohmann::json h = nlohmann::json::parse(hj);
  CHECK(h.at("quantity") == "v");
  CHECK(h.at("dimension") == 2);
  CHECK(h.at("times").size() == 2);
  CHECK(h.at("encoding") == "float64 little-endian");

  // time-major: the first value of the second slice follows all of the first
  std::ifstream bin(dir / "v.bin", std::ios::binary);
  unsigned char raw[8];
  bin.seekg(12 * 8);
  bin.read(reinterpret_cast<char*>(raw), 8);
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | raw[k];
  double value;
  std::memcpy(&value, &bits, 8);
  CHECK(value == 50.0);
  fs::remove_all(dir);
}

TEST_CASE("broken dumps") {
  const fs::path dir = scratch_dir();
  CHECK_THROWS_AS(read_field_dump(dir / "missing"), DataError);

  write_field_dump(dir / "w", "w", sample_trajectory(false));
  fs::resize_file(dir / "w.bin", 40);
  CHECK_THROWS_AS(read_field_dump(dir / "w"), DataError);

  std::ofstream(dir / "x.json") << "{ not json";
  CHECK_THROWS_AS(read_field_dump(dir / "x"), DataError);

  CHECK_THROWS_AS(write_field_dump(dir / "e", "e", FieldTrajectory{}), DataError);
  fs::remove_all(dir);
}
