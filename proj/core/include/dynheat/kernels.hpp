#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace dynheat {

/// Times below this are rejected by every kernel; all of them blow up as t -> 0.
inline constexpr double kMinTime = 1e-12;

/// Largest supported tangential dimension (N - 1).
inline constexpr std::size_t kMaxTangential = 3;

/// Spatial dimension N of the half-space R^{N-1} x R_+. N >= 2.
class Dimension {
 public:
  explicit Dimension(int n);
  int value() const noexcept { return n_; }
  int tangential() const noexcept { return n_ - 1; }
  friend bool operator==(Dimension, Dimension) = default;

 private:
  int n_;
};

/// Fixed-capacity coordinate vector for the tangential part x'.
class Tangential {
 public:
  Tangential() = default;
  explicit Tangential(std::size_t size);
  Tangential(std::initializer_list<double> values);
  explicit Tangential(std::span<const double> values);

  std::size_t size() const noexcept { return size_; }
  double& operator[](std::size_t i) noexcept { return v_[i]; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }
  std::span<const double> span() const noexcept { return {v_.data(), size_}; }
  double norm_squared() const noexcept;

  friend Tangential operator-(const Tangential& a, const Tangential& b);
  friend Tangential operator+(const Tangential& a, const Tangential& b);

 private:
  std::array<double, kMaxTangential> v_{};
  std::size_t size_ = 0;
};

/// A point (x', x_N) of the closed half-space; x_N >= 0.
struct HalfSpacePoint {
  Tangential tangential;
  double height = 0.0;

  HalfSpacePoint() = default;
  HalfSpacePoint(Tangential t, double h);
  Dimension dimension() const { return Dimension(static_cast<int>(tangential.size()) + 1); }
};

/// Gauss kernel (4 pi t)^{-d/2} exp(-|z|^2 / 4t) in R^d, d = z.size().
double gauss_kernel(std::span<const double> z, double t);
double gauss_kernel_1d(double z, double t);

/// Dirichlet heat kernel of the half-space (image construction).
double dirichlet_heat_kernel(const HalfSpacePoint& x, const HalfSpacePoint& y, double t);

/// K(x, y, t) = d/dx_N of the Dirichlet heat kernel.
double normal_derivative_kernel(const HalfSpacePoint& x, const HalfSpacePoint& y, double t);

/// Normalisation constant C_N of the boundary kernel, computed once per N.
double poisson_constant(Dimension n);

/// P(x', x_N, t) = C_N s^{1-N} (1 + |x'/s|^2)^{-N/2}, s = x_N + t.
double boundary_kernel(std::span<const double> x_tangential, double x_height, double t);
double boundary_kernel(const Tangential& x_tangential, double x_height, double t);

/// Time derivative of the boundary kernel.
double dt_boundary_kernel(std::span<const double> x_tangential, double x_height, double t);
double dt_boundary_kernel(const Tangential& x_tangential, double x_height, double t);

/// Mass of P(., s) outside the ball |x'| <= radius, in closed form for N = 2, 3.
double boundary_kernel_mass_outside(Dimension n, double radius, double s);

}  // namespace dynheat
