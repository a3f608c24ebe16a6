#include "dynheat/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dynheat/errors.hpp"

namespace dynheat {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& v) {
  if (v == "inf" || v == "infinity" || v == "+inf") return kInfinity;
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v) {
  std::string s = v;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<double> out;
  for (std::string tok; is >> tok;) out.push_back(parse_real(tok));
  return out;
}

std::string format_real(double x) {
  if (x == kInfinity) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_real(v[i]);
  return out;
}

using Setter = std::function<void(const std::string&)>;
using Getter = std::function<std::string()>;

struct Field {
  Setter set;
  Getter get;
};

using Schema = std::map<std::string, std::map<std::string, Field>>;

Field real_field(double& x) {
  return {[&x](const std::string& v) { x = parse_real(v); }, [&x] { return format_real(x); }};
}
Field int_field(int& x) {
  return {[&x](const std::string& v) { x = parse_int(v); }, [&x] { return std::to_string(x); }};
}
Field bool_field(bool& x) {
  return {[&x](const std::string& v) { x = parse_bool(v); },
          [&x] { return std::string(x ? "true" : "false"); }};
}
Field list_field(std::vector<double>& x) {
  return {[&x](const std::string& v) { x = parse_list(v); }, [&x] { return format_list(x); }};
}
Field string_field(std::string& x) {
  return {[&x](const std::string& v) { x = v; }, [&x] { return x; }};
}

Schema schema_for(ExperimentSpec& s) {
  Schema m;
  auto& e = m["experiment"];
  e["id"] = string_field(s.id);
  e["dimension"] = int_field(s.dimension);
  e["output_dir"] = {[&s](const std::string& v) { s.output_dir = v; },
                     [&s] { return s.output_dir.string(); }};

  auto& x = m["exponents"];
  x["q"] = real_field(s.q);
  x["p"] = real_field(s.p);
  x["r"] = list_field(s.r_list);

  auto& d = m["datum"];
  d["kind"] = {[&s](const std::string& v) {
                 if (v == "family")
                   s.datum.kind = DatumSpec::Kind::family;
                 else if (v == "zero")
                   s.datum.kind = DatumSpec::Kind::zero;
                 else
                   throw ConfigError("datum kind must be family or zero, got '" + v + "'");
               },
               [&s] {
                 return std::string(s.datum.kind == DatumSpec::Kind::zero ? "zero" : "family");
               }};
  d["lambda"] = real_field(s.datum.params.lambda);
  d["amplitude"] = real_field(s.datum.params.amplitude);
  d["profile"] = {[&s](const std::string& v) { s.datum.params.profile.kind = TangentialProfile::parse(v); },
                  [&s] { return TangentialProfile::name(s.datum.params.profile.kind); }};
  d["profile_width"] = real_field(s.datum.params.profile.width);
  d["tail"] = {[&s](const std::string& v) { s.datum.params.tail.kind = TailProfile::parse(v); },
               [&s] { return TailProfile::name(s.datum.params.tail.kind); }};
  d["tail_width"] = real_field(s.datum.params.tail.width);

  auto& v = m["solver"];
  SolverConfig& c = s.solver;
  v["horizon_T"] = real_field(c.horizon_T);
  v["damping_M"] = real_field(c.damping_M);
  v["damping_cap"] = real_field(c.damping_cap);
  v["contraction_target"] = real_field(c.contraction_target);
  v["picard_tol"] = real_field(c.picard_tol);
  v["max_iterations"] = int_field(c.max_iterations);
  v["time_sample_count"] = int_field(c.time_sample_count);
  v["min_time_fraction"] = real_field(c.min_time_fraction);
  v["output_times"] = list_field(c.output_times);
  v["x_half_extent"] = real_field(c.grid.x_half_extent);
  v["hx"] = real_field(c.grid.hx);
  v["height"] = real_field(c.grid.height);
  v["hz"] = real_field(c.grid.hz);
  v["datum_subsamples"] = int_field(c.grid.datum_subsamples);
  v["time_panels"] = int_field(c.time_rule.panels);
  v["time_order"] = int_field(c.time_rule.order);

  auto& o = m["oracle"];
  o["dx"] = real_field(s.oracle.grid.dx);
  o["dt"] = real_field(s.oracle.grid.dt);
  o["tangential_extent"] = real_field(s.oracle.grid.tangential_extent);
  o["height_extent"] = real_field(s.oracle.grid.height_extent);
  o["refine"] = bool_field(s.oracle.refine);
  o["window_tangential"] = real_field(s.oracle.window_tangential);
  o["window_height"] = real_field(s.oracle.window_height);
  o["times"] = list_field(s.oracle.times);

  auto& t = m["estimates"];
  t["family_lambdas"] = list_field(s.estimates.family_lambdas);
  t["family_amplitudes"] = list_field(s.estimates.family_amplitudes);
  t["stability_factor"] = real_field(s.estimates.stability_factor);
  t["w_lambda"] = real_field(s.estimates.w_lambda);
  t["w_profile"] = {[&s](const std::string& v) { s.estimates.w_profile.kind = TangentialProfile::parse(v); },
                    [&s] { return TangentialProfile::name(s.estimates.w_profile.kind); }};
  t["w_profile_width"] = real_field(s.estimates.w_profile.width);
  t["w_fit_min"] = real_field(s.estimates.w_fit_min);
  t["w_fit_max"] = real_field(s.estimates.w_fit_max);
  return m;
}

}  // namespace

InitialDatum DatumSpec::make(const WeightedExponentSet& exps) const {
  InitialDatum d = kind == Kind::zero ? InitialDatum::zero() : InitialDatum::family(params);
  d.declared_exponents = exps;
  return d;
}

void ExperimentSpec::validate() const {
  if (id.empty()) throw ConfigError("experiment id must not be empty");
  if (dimension != 2) throw ConfigError("only dimension = 2 experiments are supported");
  const WeightedExponentSet e = exponents();
  for (double r : r_list)
    if (!(r >= e.q && r <= e.p)) throw ConfigError("r values must lie in [q, p]");
  solver.validate();
  oracle.grid.validate();
  if (oracle.grid.dimension != dimension) throw ConfigError("oracle dimension mismatch");
  if (!(oracle.window_tangential > 0.0 && oracle.window_tangential <= 1.0 &&
        oracle.window_height > 0.0 && oracle.window_height <= 1.0))
    throw ConfigError("oracle window fractions must lie in (0, 1]");
  for (double t : oracle.times)
    if (!(t > 0.0 && t <= solver.horizon_T)) throw ConfigError("oracle times must lie in (0, T]");
  if (estimates.family_lambdas.size() != estimates.family_amplitudes.size() ||
      estimates.family_lambdas.empty())
    throw ConfigError("family_lambdas and family_amplitudes must have the same nonzero length");
  if (!(estimates.stability_factor >= 1.0)) throw ConfigError("stability_factor must be >= 1");
  if (!(estimates.w_fit_min > 0.0 && estimates.w_fit_max > estimates.w_fit_min))
    throw ConfigError("w fit window must satisfy 0 < w_fit_min < w_fit_max");
}

WeightedExponentSet ExperimentSpec::exponents() const {
  return WeightedExponentSet::make(Dimension(dimension), q, p);
}

std::vector<double> ExperimentSpec::r_values() const {
  return r_list.empty() ? default_r_set(q, p) : r_list;
}

ExperimentSpec reference_experiment() {
  ExperimentSpec s;
  s.solver.output_times = {0.1, 0.25, 0.5, 1.0};
  s.oracle.grid.dx = 0.5 * s.solver.grid.hx;
  s.oracle.grid.tangential_extent = 6.0;
  s.oracle.grid.height_extent = 9.0;
  return s;
}

ExperimentSpec parse_experiment(std::string_view text, const std::string& source) {
  ExperimentSpec spec = reference_experiment();
  Schema schema = schema_for(spec);
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema.contains(section)) throw ConfigError(where() + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) throw ConfigError(where() + "key '" + key + "' outside any section");
    const auto& fields = schema.at(section);
    const auto it = fields.find(key);
    if (it == fields.end())
      throw ConfigError(where() + "unknown key '" + key + "' in section [" + section + "]");
    try {
      it->second.set(value);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + key + ": " + e.what());
    }
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str(), path.string());
}

std::string format_experiment(const ExperimentSpec& spec) {
  ExperimentSpec copy = spec;
  Schema schema = schema_for(copy);
  std::ostringstream os;
  for (const char* section : {"experiment", "exponents", "datum", "solver", "oracle", "estimates"}) {
    os << '[' << section << "]\n";
    for (const auto& [key, field] : schema.at(section)) os << key << " = " << field.get() << '\n';
    os << '\n';
  }
  return os.str();
}

}  // namespace dynheat
