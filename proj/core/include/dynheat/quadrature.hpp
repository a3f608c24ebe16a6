#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dynheat/errors.hpp"
#include "dynheat/kernels.hpp"

namespace dynheat {

enum class SpatialScheme { trapezoid, gauss_legendre_composite };

/// Fixed composite rule on a truncated box; the box is sized in units of
/// the local Gaussian standard deviation sqrt(2t) (or a caller-given scale).
struct SpatialQuadratureSpec {
  double truncation_radius_sigmas = 8.0;
  int nodes_per_dimension = 64;
  SpatialScheme scheme = SpatialScheme::gauss_legendre_composite;

  void validate() const;
};

/// Endpoint-singular time rule for integrands ~ s^{-a} (t - s)^{-b}.
struct SingularTimeSpec {
  double left_exponent = 0.5;
  double right_exponent = 0.5;
  int panels = 8;  // per half-interval
  int order = 4;   // Gauss-Legendre points per panel

  void validate() const;
};

enum class BoundaryTail { none, poisson };

/// Nodes and weights of a one-dimensional rule.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
const Rule1D& gauss_legendre(int order);

/// Composite rule with `nodes` total points on [a, b].
Rule1D make_rule(double a, double b, int nodes, SpatialScheme scheme);

/// Composite Gauss-Legendre with `panels` panels of `order` points on [a, b].
Rule1D composite_gauss(double a, double b, int panels, int order);

/// Rule on [lo, hi] for integrands with s^{-a} / (hi - s)^{-b} endpoint behaviour.
/// Square-root substitutions remove the singular endpoints; the rule is a
/// plain set of (node, weight) pairs so callers can reuse it across integrands.
Rule1D singular_time_rule(double lo, double hi, const SingularTimeSpec& spec);

/// Order-independent summation; pairwise so results do not depend on how
/// many terms are accumulated per block.
double pairwise_sum(std::span<const double> values);

/// Adaptive Gauss-Kronrod (31 points) on a finite interval; bisection stops
/// at `max_depth` levels.
double adaptive_integrate(double (*f)(double, const void*), const void* ctx, double a, double b,
                          double rel_tol = 1e-14, unsigned max_depth = 20);

/// As adaptive_integrate, but stops once the error estimate is below abs_tol,
/// so intervals that contribute little to a larger sum are not refined.
double adaptive_integrate_abs(double (*f)(double, const void*), const void* ctx, double a,
                              double b, double abs_tol, unsigned max_depth = 20);

namespace detail {
[[noreturn]] void throw_non_finite(const std::string& where, std::span<const double> coords,
                                   double value);
}

/// Integral over the truncated half-space box around `center`,
/// |y_i - c_i| <= R, y_N in (max(0, c_N - R), c_N + R], R = sigmas * sqrt(2t).
template <class F>
double integrate_halfspace(F&& f, const HalfSpacePoint& center, double t,
                           const SpatialQuadratureSpec& spec) {
  spec.validate();
  if (!(t > 0.0)) throw DomainError("integrate_halfspace: t must be positive");
  const std::size_t dt = center.tangential.size();
  const double radius = spec.truncation_radius_sigmas * std::sqrt(2.0 * t);
  std::vector<Rule1D> rules;
  for (std::size_t i = 0; i < dt; ++i)
    rules.push_back(make_rule(center.tangential[i] - radius, center.tangential[i] + radius,
                              spec.nodes_per_dimension, spec.scheme));
  rules.push_back(make_rule(std::max(0.0, center.height - radius), center.height + radius,
                            spec.nodes_per_dimension, spec.scheme));

  std::size_t total = 1;
  for (std::size_t i = 0; i <= dt; ++i) total *= rules[i].size();
  std::vector<double> terms(total);
  std::vector<std::size_t> idx(dt + 1, 0);
  HalfSpacePoint y(Tangential(dt), 0.0);
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    for (std::size_t i = 0; i < dt; ++i) {
      y.tangential[i] = rules[i].nodes[idx[i]];
      w *= rules[i].weights[idx[i]];
    }
    y.height = rules[dt].nodes[idx[dt]];
    w *= rules[dt].weights[idx[dt]];
    const double value = f(y);
    if (!std::isfinite(value)) {
      std::vector<double> where(y.tangential.span().begin(), y.tangential.span().end());
      where.push_back(y.height);
      detail::throw_non_finite("integrate_halfspace", where, value);
    }
    terms[k] = w * value;
    for (std::size_t i = dt + 1; i-- > 0;) {
      if (++idx[i] < rules[i].size()) break;
      idx[i] = 0;
    }
  }
  return pairwise_sum(terms);
}

/// Integral of g over R^{N-1} (N - 1 = center.size() in {1, 2}) truncated to
/// |y' - center| <= sigmas * scale. With BoundaryTail::poisson the mass
/// beyond the ball is added assuming g follows the profile of P(., scale)
/// there, with amplitude matched at the truncation sphere.
template <class G>
double integrate_boundary(G&& g, const Tangential& center, double scale,
                          const SpatialQuadratureSpec& spec,
                          BoundaryTail tail = BoundaryTail::poisson) {
  spec.validate();
  if (!(scale > 0.0)) throw DomainError("integrate_boundary: scale must be positive");
  const std::size_t dt = center.size();
  const double radius = spec.truncation_radius_sigmas * scale;
  const Dimension dim(static_cast<int>(dt) + 1);
  Tangential y(dt);
  auto eval = [&](const Tangential& at) {
    const double value = g(at);
    if (!std::isfinite(value)) detail::throw_non_finite("integrate_boundary", at.span(), value);
    return value;
  };

  double inner = 0.0;
  double edge_mean = 0.0;
  if (dt == 1) {
    const Rule1D rule = make_rule(center[0] - radius, center[0] + radius,
                                  spec.nodes_per_dimension, spec.scheme);
    std::vector<double> terms(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
      y[0] = rule.nodes[k];
      terms[k] = rule.weights[k] * eval(y);
    }
    inner = pairwise_sum(terms);
    if (tail == BoundaryTail::poisson) {
      y[0] = center[0] - radius;
      const double left = eval(y);
      y[0] = center[0] + radius;
      edge_mean = 0.5 * (left + eval(y));
    }
  } else if (dt == 2) {
    // Polar coordinates about the centre: radial composite rule, periodic
    // trapezoid in angle.
    const Rule1D radial = make_rule(0.0, radius, spec.nodes_per_dimension, spec.scheme);
    const int n_angle = 2 * spec.nodes_per_dimension;
    const double dtheta = 2.0 * M_PI / n_angle;
    std::vector<double> terms(radial.size() * static_cast<std::size_t>(n_angle));
    std::size_t k = 0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      for (int j = 0; j < n_angle; ++j) {
        const double th = j * dtheta;
        y[0] = center[0] + radial.nodes[i] * std::cos(th);
        y[1] = center[1] + radial.nodes[i] * std::sin(th);
        terms[k++] = radial.weights[i] * radial.nodes[i] * dtheta * eval(y);
      }
    }
    inner = pairwise_sum(terms);
    if (tail == BoundaryTail::poisson) {
      double acc = 0.0;
      for (int j = 0; j < n_angle; ++j) {
        const double th = j * dtheta;
        y[0] = center[0] + radius * std::cos(th);
        y[1] = center[1] + radius * std::sin(th);
        acc += eval(y);
      }
      edge_mean = acc / n_angle;
    }
  } else {
    throw ConfigError("integrate_boundary: only N - 1 in {1, 2} is supported");
  }

  if (tail == BoundaryTail::poisson && edge_mean != 0.0) {
    Tangential edge(dt);
    edge[0] = radius;
    const double profile = boundary_kernel(edge, 0.0, scale);
    inner += edge_mean / profile * boundary_kernel_mass_outside(dim, radius, scale);
  }
  return inner;
}

/// int_0^t h(s) ds with endpoint singularities removed by substitution.
template <class H>
double integrate_time_singular(H&& h, double t, const SingularTimeSpec& spec) {
  if (!(t > 0.0)) throw DomainError("integrate_time_singular: t must be positive");
  const Rule1D rule = singular_time_rule(0.0, t, spec);
  std::vector<double> terms(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double value = h(rule.nodes[k]);
    if (!std::isfinite(value)) {
      const double s = rule.nodes[k];
      detail::throw_non_finite("integrate_time_singular", std::span<const double>(&s, 1), value);
    }
    terms[k] = rule.weights[k] * value;
  }
  return pairwise_sum(terms);
}

}  // namespace dynheat

namespace dynheat {

/// int_{R^{N-1}} P(z, 0, s) m(z) dz with N - 1 = dim in {1, 2}, computed
/// through |z| = s tan(theta), under which P dz becomes C_N sin^{N-2} dtheta
/// domega. No truncation: the algebraic tail of P is mapped onto a compact
/// angular interval.
template <class M>
double integrate_poisson_weighted(M&& m, std::size_t dim, double s,
                                  const SpatialQuadratureSpec& spec) {
  spec.validate();
  if (!(s > 0.0)) throw DomainError("integrate_poisson_weighted: scale must be positive");
  const double c = poisson_constant(Dimension(static_cast<int>(dim) + 1));
  Tangential z(dim);
  auto eval = [&](const Tangential& at) {
    const double value = m(at);
    if (!std::isfinite(value))
      detail::throw_non_finite("integrate_poisson_weighted", at.span(), value);
    return value;
  };
  if (dim == 1) {
    // adaptive per angular panel: compactly supported m can fill a window of
    // width ~ support / distance that a fixed rule would undersample
    auto at_angle = [&](double theta) {
      z[0] = s * std::tan(theta);
      return eval(z);
    };
    using Fn = decltype(at_angle);
    const auto thunk = [](double theta, const void* p) { return (*static_cast<const Fn*>(p))(theta); };
    const int panels = 2 * std::max(1, spec.nodes_per_dimension / 8);
    const double width = M_PI / panels;
    std::vector<double> parts(static_cast<std::size_t>(panels));
    double scale = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double a = -0.5 * M_PI + k * width;
      scale += std::abs(adaptive_integrate(thunk, &at_angle, a, a + width, 1.0, 0));
    }
    for (int k = 0; k < panels; ++k) {
      const double a = -0.5 * M_PI + k * width;
      parts[static_cast<std::size_t>(k)] =
          adaptive_integrate_abs(thunk, &at_angle, a, a + width, 1e-12 * scale + 1e-300, 12);
    }
    return c * pairwise_sum(parts);
  }
  if (dim == 2) {
    const Rule1D polar = composite_gauss(0.0, 0.5 * M_PI, (spec.nodes_per_dimension + 7) / 8, 8);
    const int n_angle = 2 * spec.nodes_per_dimension;
    const double dphi = 2.0 * M_PI / n_angle;
    std::vector<double> terms(polar.size() * static_cast<std::size_t>(n_angle));
    std::size_t i = 0;
    for (std::size_t k = 0; k < polar.size(); ++k) {
      const double th = polar.nodes[k];
      const double r = s * std::tan(th);
      const double w = polar.weights[k] * std::sin(th) * dphi;
      for (int j = 0; j < n_angle; ++j) {
        z[0] = r * std::cos(j * dphi);
        z[1] = r * std::sin(j * dphi);
        terms[i++] = w * eval(z);
      }
    }
    return c * pairwise_sum(terms);
  }
  throw ConfigError("integrate_poisson_weighted: only N - 1 in {1, 2} is supported");
}

}  // namespace dynheat
