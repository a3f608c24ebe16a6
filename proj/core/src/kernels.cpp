#include "dynheat/kernels.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include "dynheat/errors.hpp"
#include "dynheat/quadrature.hpp"

namespace dynheat {

namespace {

constexpr int kMaxCachedDimension = 16;

void require_time(double t, const char* where) {
  if (!(t >= kMinTime) || !std::isfinite(t))
    throw DomainError(std::string(where) + ": time must be >= 1e-12, got " + std::to_string(t));
}

void require_same_dimension(const HalfSpacePoint& x, const HalfSpacePoint& y) {
  if (x.tangential.size() != y.tangential.size())
    throw DomainError("kernel points have different dimensions");
}

double squared_distance(const Tangential& a, const Tangential& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double gauss_from_squared(double r2, double t, std::size_t d) {
  return std::pow(4.0 * M_PI * t, -0.5 * static_cast<double>(d)) * std::exp(-r2 / (4.0 * t));
}

double sin_power(double theta, const void* ctx) {
  const int k = *static_cast<const int*>(ctx);
  return std::pow(std::sin(theta), k);
}

// int_0^{pi/2} sin^{N-2}
double sine_moment(int n) {
  int k = n - 2;
  if (k == 0) return 0.5 * M_PI;
  return adaptive_integrate(&sin_power, &k, 0.0, 0.5 * M_PI);
}

// area of the unit sphere S^{N-2} in R^{N-1}
double sphere_area(int n) {
  const double m = static_cast<double>(n - 1);
  return 2.0 * std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m);
}

double compute_poisson_constant(int n) { return 1.0 / (sphere_area(n) * sine_moment(n)); }

}  // namespace

Dimension::Dimension(int n) : n_(n) {
  if (n < 2) throw DomainError("dimension N must be >= 2, got " + std::to_string(n));
  if (n - 1 > static_cast<int>(kMaxTangential))
    throw DomainError("dimension N must be <= " + std::to_string(kMaxTangential + 1));
}

Tangential::Tangential(std::size_t size) : size_(size) {
  if (size > kMaxTangential) throw DomainError("tangential dimension too large");
}

Tangential::Tangential(std::initializer_list<double> values) : Tangential(values.size()) {
  std::size_t i = 0;
  for (double v : values) v_[i++] = v;
}

Tangential::Tangential(std::span<const double> values) : Tangential(values.size()) {
  for (std::size_t i = 0; i < values.size(); ++i) v_[i] = values[i];
}

double Tangential::norm_squared() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < size_; ++i) acc += v_[i] * v_[i];
  return acc;
}

Tangential operator-(const Tangential& a, const Tangential& b) {
  Tangential out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Tangential operator+(const Tangential& a, const Tangential& b) {
  Tangential out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

HalfSpacePoint::HalfSpacePoint(Tangential t, double h) : tangential(t), height(h) {
  if (!(h >= 0.0)) throw DomainError("half-space point must have height >= 0");
}

double gauss_kernel(std::span<const double> z, double t) {
  require_time(t, "gauss_kernel");
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  return gauss_from_squared(r2, t, z.size());
}

double gauss_kernel_1d(double z, double t) {
  require_time(t, "gauss_kernel");
  return gauss_from_squared(z * z, t, 1);
}

double dirichlet_heat_kernel(const HalfSpacePoint& x, const HalfSpacePoint& y, double t) {
  require_time(t, "dirichlet_heat_kernel");
  require_same_dimension(x, y);
  const std::size_t dt = x.tangential.size();
  const double a = x.height - y.height;
  // G1(a) - G1(b) with b^2 - a^2 = 4 x_N y_N, factored to avoid cancellation.
  const double normal = gauss_from_squared(a * a, t, 1) * -std::expm1(-x.height * y.height / t);
  return gauss_from_squared(squared_distance(x.tangential, y.tangential), t, dt) * normal;
}

double normal_derivative_kernel(const HalfSpacePoint& x, const HalfSpacePoint& y, double t) {
  require_time(t, "normal_derivative_kernel");
  require_same_dimension(x, y);
  const std::size_t dt = x.tangential.size();
  const double a = x.height - y.height;
  const double b = x.height + y.height;
  const double normal = gauss_from_squared(a * a, t, 1) / (2.0 * t) *
                        (-a + b * std::exp(-x.height * y.height / t));
  return gauss_from_squared(squared_distance(x.tangential, y.tangential), t, dt) * normal;
}

double poisson_constant(Dimension n) {
  static std::once_flag flags[kMaxCachedDimension + 1];
  static double values[kMaxCachedDimension + 1];
  const int k = n.value();
  if (k > kMaxCachedDimension) return compute_poisson_constant(k);
  std::call_once(flags[k], [k] { values[k] = compute_poisson_constant(k); });
  return values[k];
}

namespace {

double boundary_kernel_impl(double r2, std::size_t dt, double x_height, double t) {
  const double s = x_height + t;
  if (!(x_height >= 0.0)) throw DomainError("boundary_kernel: x_N must be >= 0");
  if (!(s > 0.0) || !std::isfinite(s))
    throw DomainError("boundary_kernel: singular at (x_N, t) = (0, 0)");
  const int n = static_cast<int>(dt) + 1;
  const double c = poisson_constant(Dimension(n));
  return c * std::pow(s, 1.0 - n) * std::pow(1.0 + r2 / (s * s), -0.5 * n);
}

double dt_boundary_kernel_impl(double r2, std::size_t dt, double x_height, double t) {
  const double p = boundary_kernel_impl(r2, dt, x_height, t);
  const double s = x_height + t;
  const double n1 = static_cast<double>(dt);
  return (r2 - n1 * s * s) / (r2 + s * s) / s * p;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

}  // namespace

double boundary_kernel(std::span<const double> x_tangential, double x_height, double t) {
  return boundary_kernel_impl(norm2(x_tangential), x_tangential.size(), x_height, t);
}

double boundary_kernel(const Tangential& x_tangential, double x_height, double t) {
  return boundary_kernel_impl(x_tangential.norm_squared(), x_tangential.size(), x_height, t);
}

double dt_boundary_kernel(std::span<const double> x_tangential, double x_height, double t) {
  return dt_boundary_kernel_impl(norm2(x_tangential), x_tangential.size(), x_height, t);
}

double dt_boundary_kernel(const Tangential& x_tangential, double x_height, double t) {
  return dt_boundary_kernel_impl(x_tangential.norm_squared(), x_tangential.size(), x_height, t);
}

double boundary_kernel_mass_outside(Dimension n, double radius, double s) {
  if (!(s > 0.0)) throw DomainError("boundary_kernel_mass_outside: scale must be positive");
  if (!(radius >= 0.0)) throw DomainError("boundary_kernel_mass_outside: negative radius");
  // With |x'| = s tan(theta) the radial density becomes sin^{N-2}(theta).
  switch (n.value()) {
    case 2:
      return 1.0 - 2.0 / M_PI * std::atan(radius / s);
    case 3:
      return s / std::hypot(s, radius);
    default: {
      int k = n.value() - 2;
      const double edge = std::atan(radius / s);
      return adaptive_integrate(&sin_power, &k, edge, 0.5 * M_PI) / sine_moment(n.value());
    }
  }
}

}  // namespace dynheat
