#include "dynheat/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "dynheat/errors.hpp"
#include "dynheat/quadrature.hpp"

namespace dynheat {

WeightedExponentSet WeightedExponentSet::make(Dimension n, double q, double p, double r) {
  if (!(q >= 1.0)) throw ConfigError("q must be >= 1");
  if (q == kInfinity) {
    if (p != kInfinity) throw ConfigError("q = inf requires p = inf");
  } else {
    const double bound = n.value() * q / (n.value() - 1);
    if (!(p > bound))
      throw ConfigError("inadmissible exponents: need p > Nq/(N-1) = " + std::to_string(bound));
  }
  if (!(r >= q && r <= p)) throw ConfigError("exponent r must satisfy q <= r <= p");
  WeightedExponentSet e;
  e.n = n;
  e.q = q;
  e.p = p;
  e.r = r;
  e.alpha_r = alpha_of(n, q, r);
  return e;
}

double WeightedExponentSet::time_exponent() const {
  return 0.5 * n.value() * (reciprocal(q) - reciprocal(p));
}

double WeightedExponentSet::lambda_threshold() const {
  return (n.value() - 1) * (reciprocal(q) - reciprocal(p));
}

void DampedNormParams::validate() const {
  if (!(horizon_T > 0.0)) throw ConfigError("horizon T must be positive");
  if (!(damping_M >= 0.0)) throw ConfigError("damping M must be nonnegative");
}

CellAxis CellAxis::covering(double lo, double hi, double h) {
  if (!(hi > lo) || !(h > 0.0)) throw ConfigError("CellAxis: empty axis");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / h));
  return CellAxis{lo, h, std::max<std::size_t>(n, 1)};
}

namespace {

std::size_t product_count(const std::vector<CellAxis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.n;
  return n;
}

double product_volume(const std::vector<CellAxis>& axes) {
  double v = 1.0;
  for (const auto& a : axes) v *= a.h;
  return v;
}

Tangential unflatten(const std::vector<CellAxis>& axes, std::size_t j) {
  Tangential t(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    t[i] = axes[i].center(j % axes[i].n);
    j /= axes[i].n;
  }
  return t;
}

void check_values(std::span<const double> values, std::size_t expected, const char* what) {
  if (values.size() != expected)
    throw ConfigError(std::string(what) + ": value count does not match grid shape");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw NumericError(std::string(what) + ": non-finite sample at flat index " +
                         std::to_string(i));
}

// (sum w_i |f_i|^r)^{1/r}, scaled by the max to keep large r from overflowing.
double scaled_lr(std::span<const double> values, std::span<const double> weights, double volume,
                 double r) {
  double fmax = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    fmax = std::max(fmax, std::abs(values[i]) * (weights.empty() ? 1.0 : weights[i]));
  if (r == kInfinity || fmax == 0.0) return fmax;
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    terms[i] = std::pow(std::abs(values[i]) * w / fmax, r);
  }
  return fmax * std::pow(volume * pairwise_sum(terms), 1.0 / r);
}

}  // namespace

std::size_t SampledField::tangential_count() const { return product_count(tangential); }

double SampledField::cell_volume() const { return product_volume(tangential) * height.h; }

HalfSpacePoint SampledField::point(std::size_t row, std::size_t j) const {
  return HalfSpacePoint(unflatten(tangential, j), height.center(row));
}

void SampledField::check() const {
  if (height.lo < 0.0) throw ConfigError("SampledField: height axis must start at x_N >= 0");
  check_values(values, size(), "SampledField");
}

std::size_t SampledBoundaryField::size() const { return product_count(tangential); }

double SampledBoundaryField::cell_volume() const { return product_volume(tangential); }

Tangential SampledBoundaryField::point(std::size_t j) const { return unflatten(tangential, j); }

void SampledBoundaryField::check() const { check_values(values, size(), "SampledBoundaryField"); }

SampledField sample_field(const std::function<double(const HalfSpacePoint&)>& f,
                          std::vector<CellAxis> tangential, CellAxis height) {
  SampledField out{std::move(tangential), height, {}};
  const std::size_t nt = out.tangential_count();
  out.values.resize(nt * height.n);
  for (std::size_t k = 0; k < height.n; ++k)
    for (std::size_t j = 0; j < nt; ++j) out.values[k * nt + j] = f(out.point(k, j));
  return out;
}

SampledBoundaryField sample_boundary(const std::function<double(const Tangential&)>& g,
                                     std::vector<CellAxis> tangential) {
  SampledBoundaryField out{std::move(tangential), {}};
  out.values.resize(out.size());
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] = g(out.point(j));
  return out;
}

double weight_h(double x_height) {
  if (!(x_height >= 0.0)) throw DomainError("weight_h: x_N must be >= 0");
  if (x_height == kInfinity) return 1.0;
  return x_height / (x_height + 1.0);
}

double alpha_of(Dimension n, double q, double r) {
  if (!(q >= 1.0)) throw DomainError("alpha_of: q must be >= 1");
  if (r < q) throw DomainError("alpha_of: r must be >= q");
  return (n.value() - 1) * (reciprocal(q) - reciprocal(r)) + reciprocal(q);
}

double weighted_lq_norm(const SampledField& f, double q, double alpha) {
  if (!(q >= 1.0)) throw DomainError("weighted_lq_norm: q must be >= 1");
  if (!(alpha >= 0.0)) throw DomainError("weighted_lq_norm: alpha must be >= 0");
  f.check();
  if (q == kInfinity) return lp_norm(f, kInfinity);
  const std::size_t nt = f.tangential_count();
  std::vector<double> weights(f.values.size());
  for (std::size_t k = 0; k < f.height.n; ++k) {
    const double w = std::pow(weight_h(f.height.center(k)), -alpha);
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t i = k * nt + j;
      if (f.values[i] != 0.0 && !std::isfinite(w * f.values[i])) {
        std::ostringstream os;
        os << "weighted_lq_norm: weight overflow at row " << k << " (x_N = " << f.height.center(k)
           << "), tangential index " << j;
        throw NumericError(os.str());
      }
      weights[i] = f.values[i] == 0.0 ? 0.0 : w;
    }
  }
  const double result = scaled_lr(f.values, weights, f.cell_volume(), q);
  if (!std::isfinite(result)) throw NumericError("weighted_lq_norm: overflow in reduction");
  return result;
}

double lp_norm(const SampledField& f, double r) {
  if (!(r >= 1.0)) throw DomainError("lp_norm: r must be >= 1");
  f.check();
  return scaled_lr(f.values, {}, f.cell_volume(), r);
}

double lp_norm(const SampledBoundaryField& f, double r) {
  if (!(r >= 1.0)) throw DomainError("lp_norm: r must be >= 1");
  f.check();
  return scaled_lr(f.values, {}, f.cell_volume(), r);
}

std::vector<double> default_r_set(double q, double p) {
  const double mid = 2.0 / (reciprocal(q) + reciprocal(p));
  std::vector<double> out{q};
  if (mid > q && mid < p) out.push_back(mid);
  if (p > q) out.push_back(p);
  return out;
}

double energy_functional(const EnergyRecord& record, const WeightedExponentSet& exps) {
  if (record.boundary_dv.empty()) throw ConfigError("energy_functional: empty r-set");
  if (!(record.t > 0.0)) throw DomainError("energy_functional: t must be positive");
  const double t = record.t;
  const double first =
      std::pow(t, exps.time_exponent()) * (record.v_lp + std::sqrt(t) * record.dv_lp);
  double sup = 0.0;
  for (const auto& [r, value] : record.boundary_dv) {
    if (!std::isfinite(value)) throw NumericError("energy_functional: non-finite boundary norm");
    sup = std::max(sup, std::sqrt(t) * value);
  }
  return first + sup;
}

double xtm_norm(std::span<const std::pair<double, double>> trajectory_energies,
                const DampedNormParams& params) {
  params.validate();
  if (trajectory_energies.empty()) throw ConfigError("xtm_norm: empty trajectory");
  double sup = 0.0;
  for (const auto& [t, e] : trajectory_energies) {
    if (!(t > 0.0 && t <= params.horizon_T))
      throw DomainError("xtm_norm: sample time outside (0, T]");
    sup = std::max(sup, std::exp(-params.damping_M * t) * e);
  }
  return sup;
}

bool membership_criterion(double lambda, const WeightedExponentSet& exps) {
  return lambda > exps.lambda_threshold();
}

}  // namespace dynheat
