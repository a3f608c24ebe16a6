#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dynheat/kernels.hpp"
#include "dynheat/norms.hpp"
#include "dynheat/quadrature.hpp"

namespace dynheat {

/// Tangential profile Phi(x') of the product family phi = Phi(x') Psi(x_N).
struct TangentialProfile {
  enum class Kind { gaussian, bump, box };
  Kind kind = Kind::gaussian;
  double width = 1.0;

  double operator()(const Tangential& x) const;
  static Kind parse(const std::string& name);
  static std::string name(Kind kind);
};

/// Continuation theta(x_N) of Psi beyond x_N = 1.
struct TailProfile {
  enum class Kind { gaussian, zero };
  Kind kind = Kind::gaussian;
  double width = 1.0;

  /// Value for x_N > 1, continuous with x_N^lambda at x_N = 1.
  double operator()(double x_height, double lambda) const;
  static Kind parse(const std::string& name);
  static std::string name(Kind kind);
};

struct FamilyParams {
  double lambda = 1.5;
  double amplitude = 1.0;
  TangentialProfile profile;
  TailProfile tail;
};

/// Initial datum phi on the open half-space.
struct InitialDatum {
  std::function<double(const HalfSpacePoint&)> evaluator;
  std::optional<WeightedExponentSet> declared_exponents;
  std::optional<FamilyParams> family_params;

  double operator()(const HalfSpacePoint& x) const { return evaluator(x); }
  bool is_zero() const { return zero_; }

  static InitialDatum zero();
  static InitialDatum from_function(std::function<double(const HalfSpacePoint&)> f);
  /// amplitude * Phi(x') * (x_N^lambda for x_N <= 1, theta(x_N) beyond).
  static InitialDatum family(const FamilyParams& params);

 private:
  bool zero_ = false;
};

/// Boundary samples d_{x_N} v(., 0, t) at increasing positive times.
struct BoundaryTrajectory {
  std::vector<double> times;
  std::vector<SampledBoundaryField> values;

  void check() const;
  /// Value at (y', s): multilinear in y' between cell centres (zero outside
  /// the grid), linear in log t between sample times, held constant outside
  /// the sampled time range.
  double value_at(const Tangential& y, double s) const;
};

/// Sampled field at increasing positive times; `trace` optionally carries the
/// x_N = 0 values, which are not part of the midpoint grid.
struct FieldTrajectory {
  std::vector<double> times;
  std::vector<SampledField> values;
  std::vector<SampledBoundaryField> trace;

  void check() const;
};

/// Quadrature settings shared by the pointwise operators.
struct PointwiseQuadrature {
  SpatialQuadratureSpec space{8.0, 48, SpatialScheme::gauss_legendre_composite};
  SpatialQuadratureSpec poisson{8.0, 64, SpatialScheme::gauss_legendre_composite};
  SingularTimeSpec time{0.5, 0.5, 8, 4};
  /// Half-width a of a box |y_i| <= a outside which S2 data vanish. When set,
  /// apply_S2 integrates over the box; a quadrature over the whole hyperplane
  /// cannot find compact support far from x' on the scale x_N + t.
  std::optional<double> boundary_support;
};

// Pointwise evaluation, any supported N. These are direct quadratures of the
// defining integrals and serve as the reference route for the grid engine.

double apply_S1(const InitialDatum& phi, double t, const HalfSpacePoint& x,
                const PointwiseQuadrature& quad = {});
double apply_dxN_S1(const InitialDatum& phi, double t, const HalfSpacePoint& x,
                    const PointwiseQuadrature& quad = {});

/// [S2(t) psi](x) evaluated as the boundary value at time t + x_N.
double apply_S2(const std::function<double(const Tangential&)>& psi, double t,
                 const HalfSpacePoint& x, const PointwiseQuadrature& quad = {});
double apply_S2(const SampledBoundaryField& psi, double t, const HalfSpacePoint& x,
                const PointwiseQuadrature& quad = {});

/// F[v](x, t) from the boundary flux; x_N must be > 0.
double apply_F(const BoundaryTrajectory& flux, const HalfSpacePoint& x, double t,
               const PointwiseQuadrature& quad = {});

/// D[v](x, t) = int_0^t [S1(t - s) F[v](s)](x) ds.
double apply_D(const BoundaryTrajectory& flux, const HalfSpacePoint& x, double t,
               const PointwiseQuadrature& quad = {});

/// w(x, t) = int_0^t [S2(t - s) d_{x_N} v(s)](x) ds.
double compute_w(const BoundaryTrajectory& flux, const HalfSpacePoint& x, double t,
                 const PointwiseQuadrature& quad = {});

}  // namespace dynheat
