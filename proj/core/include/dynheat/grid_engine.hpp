#pragma once

#include <span>
#include <vector>

#include "dynheat/norms.hpp"
#include "dynheat/operators.hpp"

namespace dynheat {

// Exact integrals of the one-dimensional kernels over a cell [a, b].
// The grid engine treats sampled data as piecewise constant on cells and
// applies these, so no kernel is ever point-sampled on a grid coarser than
// its width.

/// int_a^b G1(x - y, t) dy
double gauss_cell(double x, double a, double b, double t);
/// int_a^b [G1(z - y, t) - G1(z + y, t)] dy
double dirichlet_cell(double z, double a, double b, double t);
/// int_a^b d/dz [G1(z - y, t) - G1(z + y, t)] dy
double normal_cell(double z, double a, double b, double t);
/// int_a^b P(x - y, 0, s) dy for N = 2
double poisson_cell(double x, double a, double b, double s);
/// int_a^b dP/dt(x - y, 0, s) dy for N = 2
double dt_poisson_cell(double x, double a, double b, double s);

/// Operators of the N = 2 problem on a uniform cell grid [x.lo, x.hi] x [0, z.hi].
///
/// Volume data are nz x nx arrays (row = height cell). Outputs are "row
/// fields" of (nz + 1) x nx values: row 0 holds x_N = 0, row k + 1 the
/// k-th cell centre.
class PlaneEngine {
 public:
  PlaneEngine(CellAxis x, CellAxis z);

  const CellAxis& x_axis() const noexcept { return x_; }
  const CellAxis& z_axis() const noexcept { return z_; }
  std::size_t nx() const noexcept { return x_.n; }
  std::size_t nz() const noexcept { return z_.n; }
  std::size_t volume_size() const noexcept { return x_.n * z_.n; }
  std::size_t row_field_size() const noexcept { return x_.n * (z_.n + 1); }

  /// values += weight * S1(tau) data, normals += weight * d_{x_N} S1(tau) data.
  /// Either output may be empty.
  void accumulate_heat(std::span<const double> data, double tau, double weight,
                       std::span<double> values, std::span<double> normals) const;

  /// out += weight * [S2 at boundary time s] psi (one row of nx values).
  void accumulate_poisson(std::span<const double> psi, double s, double weight,
                          std::span<double> out) const;
  /// out += weight * [d/dt S2 at boundary time s] psi.
  void accumulate_dt_poisson(std::span<const double> psi, double s, double weight,
                             std::span<double> out) const;

  /// Tangential kernels as 2 nx - 1 entries indexed by d + nx - 1 (d = i - j).
  std::size_t kernel_size() const noexcept { return 2 * x_.n - 1; }
  void add_poisson_kernel(double s, double weight, std::span<double> kernel) const;
  void add_dt_poisson_kernel(double s, double weight, std::span<double> kernel) const;
  /// out += weight * (kernel * in) along x.
  void convolve(std::span<const double> kernel, std::span<const double> in, double weight,
                std::span<double> out) const {
    convolve_x(kernel, in, weight, out, x_.n);
  }

  /// Cell averages (sub x sub midpoint sub-samples) of phi on the volume grid.
  std::vector<double> sample(const InitialDatum& phi, int sub = 1) const;

  SampledField volume_field(std::span<const double> rows_or_volume, bool has_boundary_row) const;
  SampledBoundaryField boundary_field(std::span<const double> row) const;

 private:
  /// out += weight * (kernel * in) for an even kernel of 2 nx - 1 entries, |i - j| <= band.
  void convolve_x(std::span<const double> kernel, std::span<const double> in, double weight,
                  std::span<double> out, std::size_t band) const;

  CellAxis x_;
  CellAxis z_;
};

}  // namespace dynheat
