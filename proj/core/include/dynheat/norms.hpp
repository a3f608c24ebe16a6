#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "dynheat/kernels.hpp"

namespace dynheat {

/// Sentinel for an infinite Lebesgue exponent; 1 / kInfinity == 0 exactly.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double reciprocal(double exponent) {
  return exponent == kInfinity ? 0.0 : 1.0 / exponent;
}

/// (N, q, p, r, alpha(r)) with p > Nq/(N-1) (p = inf when q = inf) and q <= r <= p.
struct WeightedExponentSet {
  Dimension n{2};
  double q = 1.0;
  double p = kInfinity;
  double r = kInfinity;
  double alpha_r = 0.0;

  static WeightedExponentSet make(Dimension n, double q, double p, double r);
  static WeightedExponentSet make(Dimension n, double q, double p) { return make(n, q, p, p); }

  /// Exponent of the time prefactor t^{(N/2)(1/q - 1/p)} in E[v].
  double time_exponent() const;
  /// Threshold (N-1)(1/q - 1/p) of the membership criterion.
  double lambda_threshold() const;
};

struct DampedNormParams {
  double horizon_T = 1.0;
  double damping_M = 1.0;

  void validate() const;
};

/// Uniform cell-centred axis: centres lo + (i + 1/2) h, i < n.
struct CellAxis {
  double lo = 0.0;
  double h = 1.0;
  std::size_t n = 0;

  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * h; }
  double edge(std::size_t i) const { return lo + static_cast<double>(i) * h; }
  double hi() const { return lo + static_cast<double>(n) * h; }
  static CellAxis covering(double lo, double hi, double h);
};

/// Samples on a truncated half-space box; values[k * tangential_count() + j],
/// k the height row, j the flattened tangential index (last axis fastest).
struct SampledField {
  std::vector<CellAxis> tangential;
  CellAxis height;
  std::vector<double> values;

  std::size_t tangential_count() const;
  std::size_t size() const { return tangential_count() * height.n; }
  double cell_volume() const;
  double& at(std::size_t row, std::size_t j) { return values[row * tangential_count() + j]; }
  double at(std::size_t row, std::size_t j) const { return values[row * tangential_count() + j]; }
  HalfSpacePoint point(std::size_t row, std::size_t j) const;
  void check() const;
};

/// Samples on the truncated boundary hyperplane.
struct SampledBoundaryField {
  std::vector<CellAxis> tangential;
  std::vector<double> values;

  std::size_t size() const;
  double cell_volume() const;
  Tangential point(std::size_t j) const;
  void check() const;
};

/// Evaluate f at every cell centre.
SampledField sample_field(const std::function<double(const HalfSpacePoint&)>& f,
                          std::vector<CellAxis> tangential, CellAxis height);
SampledBoundaryField sample_boundary(const std::function<double(const Tangential&)>& g,
                                     std::vector<CellAxis> tangential);

/// h(x_N) = x_N / (x_N + 1).
double weight_h(double x_height);

/// alpha(r) = (N-1)(1/q - 1/r) + 1/q.
double alpha_of(Dimension n, double q, double r);

/// (sum |f|^q h^{-alpha q} dV)^{1/q}; plain sup norm when q = inf.
double weighted_lq_norm(const SampledField& f, double q, double alpha);

double lp_norm(const SampledField& f, double r);
double lp_norm(const SampledBoundaryField& f, double r);

/// Norms of one time slice of v that enter E[v](t).
struct EnergyRecord {
  double t = 0.0;
  double v_lp = 0.0;
  double dv_lp = 0.0;
  std::vector<std::pair<double, double>> boundary_dv;  // (r, |d_N v(t)|_{L^r})
};

/// {q, 2qp/(q+p), p}, deduplicated; the middle value is the midpoint in 1/r.
std::vector<double> default_r_set(double q, double p);

double energy_functional(const EnergyRecord& record, const WeightedExponentSet& exps);

/// sup over samples of e^{-Mt} E(t).
double xtm_norm(std::span<const std::pair<double, double>> trajectory_energies,
                const DampedNormParams& params);

/// True iff Phi(x') x_N^lambda (near x_N = 0) lies in L^q_{alpha(p)}.
bool membership_criterion(double lambda, const WeightedExponentSet& exps);

}  // namespace dynheat
