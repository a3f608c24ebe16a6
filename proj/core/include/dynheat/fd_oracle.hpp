#pragma once

#include <span>
#include <vector>

#include "dynheat/norms.hpp"
#include "dynheat/operators.hpp"

namespace dynheat {

/// Node grid of the explicit scheme. Tangential nodes -L + i dx (i = 0..2L/dx),
/// height nodes j dx (j = 0..H/dx); the outer walls carry homogeneous Dirichlet
/// values and row j = 0 is the dynamical boundary unknown.
struct FDGrid {
  int dimension = 2;
  double tangential_extent = 6.0;  // L
  double height_extent = 5.0;      // H
  double dx = 0.05;
  double dt = 0.0;  // 0 picks 0.9 of the stability limit
  bool dynamical_boundary = true;

  void validate() const;
  double stability_limit() const { return dx * dx / (2.0 * dimension); }
  double step() const { return dt > 0.0 ? dt : 0.9 * stability_limit(); }
  std::size_t tangential_nodes() const;  // per axis, walls included
  std::size_t height_nodes() const;      // rows, wall included
};

struct FDState {
  double t = 0.0;
  std::vector<double> values;  // values[j * row_stride + flat tangential index]
};

FDState fd_initial_state(const InitialDatum& phi, const FDGrid& grid);

/// One explicit step of size dt (<= the stability limit).
FDState fd_step(const FDState& state, const FDGrid& grid, double dt);
FDState fd_step(const FDState& state, const FDGrid& grid);

/// u sampled at the given increasing times in (0, T]; `values` hold the
/// wall-free interior nodes and `trace` the x_N = 0 row.
FieldTrajectory fd_solve(const InitialDatum& phi, const FDGrid& grid, std::span<const double> times);

/// Multilinear interpolation of a sampled field between its centres.
double field_value_at(const SampledField& f, const HalfSpacePoint& x);

}  // namespace dynheat
