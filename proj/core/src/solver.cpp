#include "dynheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynheat/errors.hpp"

namespace dynheat {

namespace {

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

SingularTimeSpec with_exponents(SingularTimeSpec s, double a, double b) {
  s.left_exponent = a;
  s.right_exponent = b;
  return s;
}

PlaneState combine(const PlaneState& a, const PlaneState& b, double sign) {
  if (a.values.size() != b.values.size()) throw ConfigError("PlaneState: time count mismatch");
  PlaneState out = a;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    for (std::size_t i = 0; i < a.values[n].size(); ++i) out.values[n][i] += sign * b.values[n][i];
    for (std::size_t i = 0; i < a.normals[n].size(); ++i)
      out.normals[n][i] += sign * b.normals[n][i];
  }
  return out;
}

}  // namespace

PlaneState operator-(const PlaneState& a, const PlaneState& b) { return combine(a, b, -1.0); }
PlaneState operator+(const PlaneState& a, const PlaneState& b) { return combine(a, b, 1.0); }

void PlaneGridSpec::validate() const {
  if (!(x_half_extent > 0.0 && hx > 0.0 && height > 0.0 && hz > 0.0))
    throw ConfigError("grid: extents and spacings must be positive");
  if (datum_subsamples < 1) throw ConfigError("grid: datum_subsamples must be >= 1");
}

PlaneEngine PlaneGridSpec::make_engine() const {
  validate();
  return PlaneEngine(CellAxis::covering(-x_half_extent, x_half_extent, hx),
                     CellAxis::covering(0.0, height, hz));
}

void SolverConfig::validate() const {
  if (!(horizon_T > 0.0)) throw ConfigError("solver: horizon_T must be positive");
  if (!(damping_M >= 1.0)) throw ConfigError("solver: damping_M must be >= 1");
  if (!(damping_cap >= damping_M)) throw ConfigError("solver: damping_cap below damping_M");
  if (!(contraction_target > 0.0 && contraction_target < 1.0))
    throw ConfigError("solver: contraction_target must lie in (0, 1)");
  if (!(picard_tol > 0.0)) throw ConfigError("solver: picard_tol must be positive");
  if (max_iterations < 2) throw ConfigError("solver: max_iterations must be >= 2");
  if (time_sample_count < 4) throw ConfigError("solver: time_sample_count must be >= 4");
  if (!(min_time_fraction > 0.0 && min_time_fraction < 1.0))
    throw ConfigError("solver: min_time_fraction must lie in (0, 1)");
  for (double t : output_times)
    if (!(t > 0.0 && t <= horizon_T)) throw ConfigError("solver: output time outside (0, T]");
  grid.validate();
  time_rule.validate();
}

std::vector<double> SolverConfig::time_nodes() const {
  validate();
  const double t0 = min_time_fraction * horizon_T;
  const double ratio = std::pow(horizon_T / t0, 1.0 / (time_sample_count - 1));
  std::vector<double> nodes;
  for (int i = 0; i < time_sample_count; ++i)
    nodes.push_back(i + 1 == time_sample_count ? horizon_T : t0 * std::pow(ratio, i));
  // output times replace geometric nodes that sit too close to them
  for (double t : output_times) {
    std::erase_if(nodes, [&](double s) { return std::abs(std::log(s / t)) < 0.25 * std::log(ratio); });
    nodes.push_back(t);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

PlaneProblem::PlaneProblem(PlaneEngine engine, std::vector<double> times, SingularTimeSpec rule)
    : engine_(std::move(engine)), times_(std::move(times)), rule_(rule) {
  rule_.validate();
  if (times_.empty()) throw ConfigError("PlaneProblem: no time nodes");
  for (std::size_t n = 0; n < times_.size(); ++n) {
    if (!(times_[n] >= kMinTime) || (n > 0 && !(times_[n] > times_[n - 1])))
      throw ConfigError("PlaneProblem: time nodes must be positive and increasing");
    log_times_.push_back(std::log(times_[n]));
  }
}

PlaneProblem::Bracket PlaneProblem::locate(double s) const {
  if (s <= times_.front()) return {0, 0.0};
  if (s >= times_.back()) return {times_.size() - 1, 0.0};
  const auto it = std::upper_bound(times_.begin(), times_.end(), s);
  const auto j = static_cast<std::size_t>(it - times_.begin()) - 1;
  return {j, (std::log(s) - log_times_[j]) / (log_times_[j + 1] - log_times_[j])};
}

void PlaneProblem::interpolate(const std::vector<std::vector<double>>& series, double s,
                               std::vector<double>& out) const {
  const Bracket b = locate(s);
  const auto& lo = series[b.j];
  out.assign(lo.begin(), lo.end());
  if (b.theta == 0.0) return;
  const auto& hi = series[b.j + 1];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.theta * (hi[i] - lo[i]);
}

PlaneState PlaneProblem::heat(std::span<const double> phi) const {
  PlaneState s;
  for (double t : times_) {
    auto values = zeros(engine_.row_field_size());
    auto normals = zeros(engine_.row_field_size());
    if (!all_zero(phi)) engine_.accumulate_heat(phi, t, 1.0, values, normals);
    s.values.push_back(std::move(values));
    s.normals.push_back(std::move(normals));
  }
  return s;
}

void PlaneProblem::lagged_convolution(const std::vector<std::vector<double>>& flux,
                                      const Rule1D& rule, double t, double shift, bool derivative,
                                      std::span<double> out) const {
  // The flux is linear in log t between nodes, so the kernels of all rule nodes
  // that fall into one bracket are merged before a single convolution.
  const std::size_t nk = engine_.kernel_size();
  std::vector<std::vector<double>> merged(times_.size());
  std::vector<double> k(nk);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Bracket b = locate(rule.nodes[i]);
    std::fill(k.begin(), k.end(), 0.0);
    const double s = shift + t - rule.nodes[i];
    if (derivative)
      engine_.add_dt_poisson_kernel(s, rule.weights[i], k);
    else
      engine_.add_poisson_kernel(s, rule.weights[i], k);
    auto add = [&](std::size_t j, double c) {
      if (c == 0.0) return;
      if (merged[j].empty()) merged[j].assign(nk, 0.0);
      for (std::size_t m = 0; m < nk; ++m) merged[j][m] += c * k[m];
    };
    add(b.j, 1.0 - b.theta);
    if (b.theta > 0.0) add(b.j + 1, b.theta);
  }
  for (std::size_t j = 0; j < merged.size(); ++j)
    if (!merged[j].empty() && !all_zero(flux[j])) engine_.convolve(merged[j], flux[j], 1.0, out);
}

std::vector<std::vector<double>> PlaneProblem::coupling(
    const std::vector<std::vector<double>>& flux) const {
  const std::size_t nx = engine_.nx();
  const std::size_t nz = engine_.nz();
  const SingularTimeSpec spec = with_exponents(rule_, 0.5, 0.5);
  std::vector<std::vector<double>> out;
  for (std::size_t n = 0; n < times_.size(); ++n) {
    auto f = zeros(nx * nz);
    const double t = times_[n];
    const Rule1D rule = singular_time_rule(0.0, t, spec);
    for (std::size_t k = 0; k < nz; ++k) {
      const double z = engine_.z_axis().center(k);
      const std::span<double> row = std::span<double>(f).subspan(k * nx, nx);
      engine_.accumulate_poisson(flux[n], z, 1.0, row);
      lagged_convolution(flux, rule, t, z, true, row);
    }
    out.push_back(std::move(f));
  }
  return out;
}

PlaneState PlaneProblem::duhamel(const std::vector<std::vector<double>>& coupling_values) const {
  const SingularTimeSpec spec = with_exponents(rule_, 0.5, 0.5);
  PlaneState s;
  std::vector<double> f;
  for (double t : times_) {
    auto values = zeros(engine_.row_field_size());
    auto normals = zeros(engine_.row_field_size());
    const Rule1D rule = singular_time_rule(0.0, t, spec);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      interpolate(coupling_values, rule.nodes[i], f);
      if (all_zero(f)) continue;
      engine_.accumulate_heat(f, t - rule.nodes[i], rule.weights[i], values, normals);
    }
    s.values.push_back(std::move(values));
    s.normals.push_back(std::move(normals));
  }
  return s;
}

std::vector<std::vector<double>> PlaneProblem::fluxes(const PlaneState& s) const {
  std::vector<std::vector<double>> out;
  for (std::size_t n = 0; n < s.normals.size(); ++n) {
    const auto g = s.flux(engine_, n);
    out.emplace_back(g.begin(), g.end());
  }
  return out;
}

PlaneState PlaneProblem::apply_D(const PlaneState& v) const {
  return duhamel(coupling(fluxes(v)));
}

std::vector<std::vector<double>> PlaneProblem::boundary_part(
    const std::vector<std::vector<double>>& flux) const {
  const std::size_t nx = engine_.nx();
  const std::size_t nz = engine_.nz();
  const SingularTimeSpec spec = with_exponents(rule_, 0.5, 0.0);
  std::vector<std::vector<double>> out;
  for (double t : times_) {
    auto rows = zeros(engine_.row_field_size());
    const Rule1D rule = singular_time_rule(0.0, t, spec);
    for (std::size_t r = 0; r <= nz; ++r) {
      const double z = r == 0 ? 0.0 : engine_.z_axis().center(r - 1);
      lagged_convolution(flux, rule, t, z, false, std::span<double>(rows).subspan(r * nx, nx));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

std::vector<std::pair<double, double>> PlaneProblem::energies(
    const PlaneState& s, const WeightedExponentSet& exps) const {
  const auto rs = default_r_set(exps.q, exps.p);
  std::vector<std::pair<double, double>> out;
  for (std::size_t n = 0; n < times_.size(); ++n) {
    EnergyRecord rec;
    rec.t = times_[n];
    rec.v_lp = lp_norm(engine_.volume_field(s.values[n], true), exps.p);
    rec.dv_lp = lp_norm(engine_.volume_field(s.normals[n], true), exps.p);
    const auto trace = engine_.boundary_field(s.normals[n]);
    for (double r : rs) rec.boundary_dv.emplace_back(r, lp_norm(trace, r));
    out.emplace_back(rec.t, energy_functional(rec, exps));
  }
  return out;
}

double PlaneProblem::xtm(const PlaneState& s, const WeightedExponentSet& exps, double T,
                         double M) const {
  const auto e = energies(s, exps);
  return xtm_norm(e, DampedNormParams{T, M});
}

WeightedExponentSet solver_exponents(const InitialDatum& phi, const SolverConfig& config) {
  if (phi.declared_exponents) {
    if (phi.declared_exponents->n.value() != 2)
      throw ConfigError("picard_solve: the grid solver supports N = 2 only");
    return WeightedExponentSet::make(Dimension(2), phi.declared_exponents->q,
                                     phi.declared_exponents->p);
  }
  return WeightedExponentSet::make(Dimension(2), config.q, config.p);
}

FieldTrajectory SolveResult::v_trajectory() const {
  FieldTrajectory f;
  f.times = times();
  for (const auto& row : v.values) {
    f.values.push_back(problem.engine().volume_field(row, true));
    f.trace.push_back(problem.engine().boundary_field(row));
  }
  return f;
}

FieldTrajectory SolveResult::w_trajectory() const {
  FieldTrajectory f;
  f.times = times();
  for (const auto& row : w) {
    f.values.push_back(problem.engine().volume_field(row, true));
    f.trace.push_back(problem.engine().boundary_field(row));
  }
  return f;
}

FieldTrajectory SolveResult::u_trajectory() const {
  FieldTrajectory f;
  f.times = times();
  for (const auto& row : u) {
    f.values.push_back(problem.engine().volume_field(row, true));
    f.trace.push_back(problem.engine().boundary_field(row));
  }
  return f;
}

BoundaryTrajectory SolveResult::flux() const {
  BoundaryTrajectory b;
  b.times = times();
  for (const auto& row : v.normals) b.values.push_back(problem.engine().boundary_field(row));
  return b;
}

std::size_t SolveResult::time_index(double t) const {
  const auto& ts = times();
  for (std::size_t n = 0; n < ts.size(); ++n)
    if (std::abs(ts[n] - t) <= 1e-12 * std::max(1.0, t)) return n;
  std::ostringstream os;
  os << "time " << t << " is not a solver node";
  throw ConfigError(os.str());
}

SolveResult picard_solve(const InitialDatum& phi, const SolverConfig& config) {
  config.validate();
  const WeightedExponentSet exps = solver_exponents(phi, config);
  PlaneProblem problem(config.grid.make_engine(), config.time_nodes(), config.time_rule);
  const double T = config.horizon_T;
  const auto cells = problem.engine().sample(phi, config.grid.datum_subsamples);

  SolverDiagnostics diag;
  PlaneState v0 = problem.heat(cells);
  diag.v0_norm = problem.xtm(v0, exps, T, config.damping_M);

  auto finish = [&](PlaneState v, SolverDiagnostics d) {
    auto w = problem.boundary_part(problem.fluxes(v));
    std::vector<std::vector<double>> u = v.values;
    for (std::size_t n = 0; n < u.size(); ++n)
      for (std::size_t i = 0; i < u[n].size(); ++i) u[n][i] += w[n][i];
    return SolveResult{problem, exps, std::move(v), std::move(w), std::move(u), std::move(d)};
  };

  if (phi.is_zero() || diag.v0_norm == 0.0) {
    diag.damping_M = config.damping_M;
    diag.distances = {0.0};
    diag.iterations = 1;
    diag.converged = true;
    return finish(std::move(v0), std::move(diag));
  }

  // M search: D does not depend on M, only the damped norm does
  PlaneState d_current = problem.apply_D(v0);
  const auto e_v0 = problem.energies(v0, exps);
  const auto e_d0 = problem.energies(d_current, exps);
  std::vector<double> history;
  double M = config.damping_M;
  for (;;) {
    const DampedNormParams params{T, M};
    const double ratio = xtm_norm(e_d0, params) / xtm_norm(e_v0, params);
    diag.m_search.emplace_back(M, ratio);
    history.push_back(ratio);
    if (ratio <= config.contraction_target) {
      diag.damping_M = M;
      diag.contraction_ratio = ratio;
      break;
    }
    if (2.0 * M > config.damping_cap)
      throw SolverFailure("picard_solve: no contraction up to the damping cap", history);
    M *= 2.0;
  }
  diag.v0_norm = xtm_norm(e_v0, DampedNormParams{T, M});

  PlaneState current = v0;
  for (int k = 1; k <= config.max_iterations; ++k) {
    PlaneState next = v0 - d_current;
    const double dist = problem.xtm(next - current, exps, T, M);
    diag.distances.push_back(dist);
    if (k > 1 && diag.distances[k - 2] > 0.0)
      diag.step_ratios.push_back(dist / diag.distances[k - 2]);
    current = std::move(next);
    diag.iterations = k;
    if (dist == 0.0 || (k > 1 && dist <= config.picard_tol * diag.distances.front())) {
      diag.converged = true;
      break;
    }
    if (k < config.max_iterations) d_current = problem.apply_D(current);
  }

  const PlaneState d_final = problem.apply_D(current);
  diag.residual = problem.xtm(current + d_final - v0, exps, T, M) / diag.v0_norm;
  diag.v_norm = problem.xtm(current, exps, T, M);
  return finish(std::move(current), std::move(diag));
}

}  // namespace dynheat
