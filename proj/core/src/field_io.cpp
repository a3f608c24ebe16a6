#include "dynheat/field_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "dynheat/errors.hpp"

namespace dynheat {

namespace {

using nlohmann::json;

json axis_json(const CellAxis& a) {
  return json{{"lo", a.lo}, {"hi", a.hi()}, {"spacing", a.h}, {"cells", a.n}};
}

CellAxis axis_from(const json& j) {
  return CellAxis{j.at("lo").get<double>(), j.at("spacing").get<double>(),
                  j.at("cells").get<std::size_t>()};
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  for (double x : v) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xFFU);
    out.write(buf, 8);
  }
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t count) {
  std::vector<double> v(count);
  for (auto& x : v) {
    char buf[8];
    if (!in.read(buf, 8)) throw DataError("field dump: binary file shorter than its header");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[b])) << (8 * b);
    x = std::bit_cast<double>(bits);
  }
  return v;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  return stem.parent_path() / (stem.filename().string() + ext);
}

template <class Slice>
void write_pair(const std::filesystem::path& stem, const std::string& quantity,
                const std::vector<double>& times, const std::vector<Slice>& slices,
                const std::vector<CellAxis>& axes, bool has_height, const CellAxis& height) {
  json h;
  h["quantity"] = quantity;
  h["dimension"] = axes.size() + 1;
  h["times"] = times;
  json ax = json::array();
  std::vector<std::size_t> shape{times.size()};
  if (has_height) {
    ax.push_back(axis_json(height));
    shape.push_back(height.n);
  }
  for (const auto& a : axes) {
    ax.push_back(axis_json(a));
    shape.push_back(a.n);
  }
  h["axes"] = ax;
  h["layout"] = has_height ? "time, height, tangential (last fastest)" : "time, tangential";
  h["shape"] = shape;
  h["encoding"] = "float64 little-endian";

  std::ofstream hj(with_suffix(stem, ".json"));
  if (!hj) throw DataError("field dump: cannot open " + with_suffix(stem, ".json").string());
  hj << h.dump(2) << '\n';
  std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  if (!bin) throw DataError("field dump: cannot open " + with_suffix(stem, ".bin").string());
  for (const auto& s : slices) write_doubles(bin, s.values);
}

json read_header(const std::filesystem::path& stem) {
  std::ifstream in(with_suffix(stem, ".json"));
  if (!in) throw DataError("field dump: missing header " + with_suffix(stem, ".json").string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("field dump: malformed header: ") + e.what());
  }
}

}  // namespace

void write_field_dump(const std::filesystem::path& stem, const std::string& quantity,
                      const FieldTrajectory& field) {
  field.check();
  if (field.values.empty()) throw DataError("field dump: empty trajectory");
  if (!stem.parent_path().empty()) std::filesystem::create_directories(stem.parent_path());
  const auto& first = field.values.front();
  write_pair(stem, quantity, field.times, field.values, first.tangential, true, first.height);
  if (!field.trace.empty())
    write_pair(stem.parent_path() / (stem.filename().string() + "_trace"), quantity + "_trace",
               field.times, field.trace, field.trace.front().tangential, false, CellAxis{});
}

FieldTrajectory read_field_dump(const std::filesystem::path& stem) {
  FieldTrajectory f;
  try {
    const json h = read_header(stem);
    f.times = h.at("times").get<std::vector<double>>();
    const auto& ax = h.at("axes");
    if (ax.size() < 2) throw DataError("field dump: header needs a height and a tangential axis");
    const CellAxis height = axis_from(ax[0]);
    std::vector<CellAxis> tangential;
    for (std::size_t i = 1; i < ax.size(); ++i) tangential.push_back(axis_from(ax[i]));
    std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
    if (!bin) throw DataError("field dump: missing " + with_suffix(stem, ".bin").string());
    for (std::size_t n = 0; n < f.times.size(); ++n) {
      SampledField s{tangential, height, {}};
      s.values = read_doubles(bin, s.size());
      f.values.push_back(std::move(s));
    }
    const auto trace_stem = stem.parent_path() / (stem.filename().string() + "_trace");
    if (std::filesystem::exists(with_suffix(trace_stem, ".json"))) {
      std::ifstream tb(with_suffix(trace_stem, ".bin"), std::ios::binary);
      if (!tb) throw DataError("field dump: missing trace binary");
      for (std::size_t n = 0; n < f.times.size(); ++n) {
        SampledBoundaryField b{tangential, {}};
        b.values = read_doubles(tb, b.size());
        f.trace.push_back(std::move(b));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("field dump: bad header field: ") + e.what());
  }
  f.check();
  return f;
}

}  // namespace dynheat
