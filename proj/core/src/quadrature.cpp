#include "dynheat/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>

namespace dynheat {

void SpatialQuadratureSpec::validate() const {
  if (!(truncation_radius_sigmas >= 6.0))
    throw ConfigError("truncation_radius_sigmas must be >= 6");
  if (nodes_per_dimension < 16) throw ConfigError("nodes_per_dimension must be >= 16");
}

void SingularTimeSpec::validate() const {
  if (!(left_exponent >= 0.0 && left_exponent < 1.0))
    throw ConfigError("left_exponent must lie in [0, 1)");
  if (!(right_exponent >= 0.0 && right_exponent < 1.0))
    throw ConfigError("right_exponent must lie in [0, 1)");
  if (left_exponent + right_exponent > 1.0 + 1e-15)
    throw ConfigError("left_exponent + right_exponent must be <= 1");
  if (panels < 8) throw ConfigError("singular time rule needs >= 8 panels");
  if (order < 1) throw ConfigError("singular time rule order must be >= 1");
}

namespace {

Rule1D compute_gauss_legendre(int order) {
  Rule1D rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[order - 1 - i] = x;
    rule.weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const Rule1D& gauss_legendre(int order) {
  if (order < 1) throw ConfigError("Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

Rule1D composite_gauss(double a, double b, int panels, int order) {
  const Rule1D& ref = gauss_legendre(order);
  Rule1D out;
  out.nodes.reserve(static_cast<std::size_t>(panels * order));
  out.weights.reserve(static_cast<std::size_t>(panels * order));
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int k = 0; k < order; ++k) {
      out.nodes.push_back(lo + 0.5 * h * (ref.nodes[k] + 1.0));
      out.weights.push_back(0.5 * h * ref.weights[k]);
    }
  }
  return out;
}

Rule1D make_rule(double a, double b, int nodes, SpatialScheme scheme) {
  if (nodes < 2) throw ConfigError("a quadrature rule needs at least 2 nodes");
  if (scheme == SpatialScheme::trapezoid) {
    Rule1D out;
    out.nodes.resize(nodes);
    out.weights.assign(nodes, (b - a) / (nodes - 1));
    for (int i = 0; i < nodes; ++i) out.nodes[i] = a + (b - a) * i / (nodes - 1);
    out.weights.front() *= 0.5;
    out.weights.back() *= 0.5;
    return out;
  }
  const int order = nodes >= 8 ? 8 : nodes;
  const int panels = (nodes + order - 1) / order;
  return composite_gauss(a, b, panels, order);
}

Rule1D singular_time_rule(double lo, double hi, const SingularTimeSpec& spec) {
  spec.validate();
  if (!(hi > lo)) throw DomainError("singular_time_rule: empty interval");
  const double len = hi - lo;
  const double mid = lo + 0.5 * len;
  const double umax = std::sqrt(0.5);
  Rule1D out;
  auto append = [&](const Rule1D& r) {
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  };
  // left half: s = lo + len u^2, ds = 2 len u du
  if (spec.left_exponent > 0.0) {
    Rule1D u = composite_gauss(0.0, umax, spec.panels, spec.order);
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double uk = u.nodes[k];
      u.nodes[k] = lo + len * uk * uk;
      u.weights[k] *= 2.0 * len * uk;
    }
    append(u);
  } else {
    append(composite_gauss(lo, mid, spec.panels, spec.order));
  }
  // right half: s = hi - len u^2
  if (spec.right_exponent > 0.0) {
    Rule1D u = composite_gauss(0.0, umax, spec.panels, spec.order);
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double uk = u.nodes[k];
      u.nodes[k] = hi - len * uk * uk;
      u.weights[k] *= 2.0 * len * uk;
    }
    append(u);
  } else {
    append(composite_gauss(mid, hi, spec.panels, spec.order));
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 16;
  if (values.size() <= kBlock) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double adaptive_integrate(double (*f)(double, const void*), const void* ctx, double a, double b,
                          double rel_tol, unsigned max_depth) {
  auto g = [f, ctx](double x) { return f(x, ctx); };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, max_depth, rel_tol, &error);
  if (!std::isfinite(value)) throw NumericError("adaptive_integrate: non-finite result");
  return value;
}

double adaptive_integrate_abs(double (*f)(double, const void*), const void* ctx, double a,
                              double b, double abs_tol, unsigned max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto g = [f, ctx](double x) { return f(x, ctx); };
  double error = 0.0, l1 = 0.0;
  double value = GK::integrate(g, a, b, 0, 0.0, &error, &l1);
  if (error > abs_tol && l1 > 0.0) value = GK::integrate(g, a, b, max_depth, abs_tol / l1, &error);
  if (!std::isfinite(value)) throw NumericError("adaptive_integrate_abs: non-finite result");
  return value;
}

namespace detail {

void throw_non_finite(const std::string& where, std::span<const double> coords, double value) {
  std::ostringstream os;
  os << where << ": non-finite integrand value " << value << " at (";
  for (std::size_t i = 0; i < coords.size(); ++i) os << (i ? ", " : "") << coords[i];
  os << ")";
  throw NumericError(os.str());
}

}  // namespace detail

}  // namespace dynheat
