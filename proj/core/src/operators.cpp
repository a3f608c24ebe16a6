#include "dynheat/operators.hpp"

#include <algorithm>
#include <cmath>

#include "dynheat/errors.hpp"

namespace dynheat {

double TangentialProfile::operator()(const Tangential& x) const {
  switch (kind) {
    case Kind::gaussian:
      return std::exp(-x.norm_squared() / (width * width));
    case Kind::bump: {
      const double r2 = x.norm_squared() / (width * width);
      return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
    }
    case Kind::box:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > 0.5 * width) return 0.0;
      return 1.0;
  }
  return 0.0;
}

TangentialProfile::Kind TangentialProfile::parse(const std::string& name) {
  if (name == "gaussian") return Kind::gaussian;
  if (name == "bump") return Kind::bump;
  if (name == "box") return Kind::box;
  throw ConfigError("unknown tangential profile '" + name + "'");
}

std::string TangentialProfile::name(Kind kind) {
  switch (kind) {
    case Kind::gaussian: return "gaussian";
    case Kind::bump: return "bump";
    case Kind::box: return "box";
  }
  return "?";
}

double TailProfile::operator()(double x_height, double lambda) const {
  switch (kind) {
    case Kind::gaussian: {
      const double d = (x_height - 1.0) / width;
      return std::pow(x_height, lambda) * std::exp(-d * d);
    }
    case Kind::zero:
      return 0.0;
  }
  return 0.0;
}

TailProfile::Kind TailProfile::parse(const std::string& name) {
  if (name == "gaussian") return Kind::gaussian;
  if (name == "zero") return Kind::zero;
  throw ConfigError("unknown tail profile '" + name + "'");
}

std::string TailProfile::name(Kind kind) {
  return kind == Kind::gaussian ? "gaussian" : "zero";
}

InitialDatum InitialDatum::zero() {
  InitialDatum d;
  d.evaluator = [](const HalfSpacePoint&) { return 0.0; };
  d.zero_ = true;
  return d;
}

InitialDatum InitialDatum::from_function(std::function<double(const HalfSpacePoint&)> f) {
  InitialDatum d;
  d.evaluator = std::move(f);
  return d;
}

InitialDatum InitialDatum::family(const FamilyParams& params) {
  InitialDatum d;
  d.family_params = params;
  d.zero_ = params.amplitude == 0.0;
  d.evaluator = [params](const HalfSpacePoint& x) {
    const double psi = x.height <= 1.0 ? std::pow(x.height, params.lambda)
                                       : params.tail(x.height, params.lambda);
    return params.amplitude * params.profile(x.tangential) * psi;
  };
  return d;
}

namespace {

double interpolate_boundary(const SampledBoundaryField& field, const Tangential& y) {
  const std::size_t dim = field.tangential.size();
  std::array<std::size_t, kMaxTangential> base{};
  std::array<double, kMaxTangential> frac{};
  for (std::size_t i = 0; i < dim; ++i) {
    const CellAxis& a = field.tangential[i];
    const double u = (y[i] - a.lo) / a.h - 0.5;
    if (!(u >= -0.5 && u <= static_cast<double>(a.n) - 0.5)) return 0.0;
    // half-cells at the two ends hold the end value
    const double uc = std::clamp(u, 0.0, static_cast<double>(a.n - 1));
    auto b = static_cast<std::size_t>(std::floor(uc));
    if (b + 1 >= a.n) b = a.n >= 2 ? a.n - 2 : 0;
    base[i] = b;
    frac[i] = a.n >= 2 ? uc - static_cast<double>(b) : 0.0;
  }
  double acc = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const bool up = (corner >> i) & 1U;
      const std::size_t n = field.tangential[i].n;
      const std::size_t idx = std::min(base[i] + (up ? 1 : 0), n - 1);
      w *= up ? frac[i] : 1.0 - frac[i];
      flat = flat * n + idx;
    }
    if (w != 0.0) acc += w * field.values[flat];
  }
  return acc;
}

void require_positive_time(double t, const char* where) {
  if (!(t >= kMinTime)) throw DomainError(std::string(where) + ": t must be positive");
}

SingularTimeSpec with_exponents(SingularTimeSpec spec, double a, double b) {
  spec.left_exponent = a;
  spec.right_exponent = b;
  return spec;
}

}  // namespace

void BoundaryTrajectory::check() const {
  if (times.empty() || times.size() != values.size())
    throw ConfigError("BoundaryTrajectory: times and values disagree");
  if (!(times.front() > 0.0)) throw ConfigError("BoundaryTrajectory: first time must be > 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ConfigError("BoundaryTrajectory: times must be strictly increasing");
  for (const auto& v : values) v.check();
}

double BoundaryTrajectory::value_at(const Tangential& y, double s) const {
  if (s <= times.front()) return interpolate_boundary(values.front(), y);
  if (s >= times.back()) return interpolate_boundary(values.back(), y);
  const auto it = std::upper_bound(times.begin(), times.end(), s);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double theta = std::log(s / times[lo]) / std::log(times[hi] / times[lo]);
  return (1.0 - theta) * interpolate_boundary(values[lo], y) +
         theta * interpolate_boundary(values[hi], y);
}

void FieldTrajectory::check() const {
  if (times.size() != values.size()) throw ConfigError("FieldTrajectory: size mismatch");
  if (!trace.empty() && trace.size() != times.size())
    throw ConfigError("FieldTrajectory: trace size mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
      throw ConfigError("FieldTrajectory: times must be positive and increasing");
    if (i > 0 && values[i].size() != values[0].size())
      throw ConfigError("FieldTrajectory: inconsistent shapes across times");
    values[i].check();
  }
}

double apply_S1(const InitialDatum& phi, double t, const HalfSpacePoint& x,
                const PointwiseQuadrature& quad) {
  require_positive_time(t, "apply_S1");
  if (phi.is_zero() || x.height == 0.0) return 0.0;
  return integrate_halfspace(
      [&](const HalfSpacePoint& y) {
        if (y.height == 0.0) return 0.0;
        return dirichlet_heat_kernel(x, y, t) * phi(y);
      },
      x, t, quad.space);
}

double apply_dxN_S1(const InitialDatum& phi, double t, const HalfSpacePoint& x,
                    const PointwiseQuadrature& quad) {
  require_positive_time(t, "apply_dxN_S1");
  if (phi.is_zero()) return 0.0;
  return integrate_halfspace(
      [&](const HalfSpacePoint& y) {
        if (y.height == 0.0) return 0.0;
        return normal_derivative_kernel(x, y, t) * phi(y);
      },
      x, t, quad.space);
}

namespace {

// adaptive integral over [lo, hi] with breaks around a peak of the given width
template <class F>
double integrate_with_peak(const F& f, double lo, double hi, double peak, double width) {
  const auto thunk = [](double y, const void* p) { return (*static_cast<const F*>(p))(y); };
  const double cuts[5] = {lo, std::clamp(peak - width, lo, hi), std::clamp(peak, lo, hi),
                          std::clamp(peak + width, lo, hi), hi};
  // one absolute tolerance for all pieces, scaled by a coarse first pass
  double scale = 0.0;
  for (int k = 0; k < 4; ++k)
    if (cuts[k + 1] > cuts[k]) scale += std::abs(adaptive_integrate(thunk, &f, cuts[k], cuts[k + 1], 1.0, 0));
  double sum = 0.0;
  for (int k = 0; k < 4; ++k)
    if (cuts[k + 1] > cuts[k])
      sum += adaptive_integrate_abs(thunk, &f, cuts[k], cuts[k + 1], 1e-13 * scale + 1e-300, 15);
  return sum;
}

double s2_on_box(const std::function<double(const Tangential&)>& psi, double t,
                 const HalfSpacePoint& x, double a) {
  const Tangential& xt = x.tangential;
  const double s = t + x.height;
  if (xt.size() == 1) {
    const auto f = [&](double y) {
      return boundary_kernel(Tangential{xt[0] - y}, x.height, t) * psi(Tangential{y});
    };
    return integrate_with_peak(f, -a, a, xt[0], s);
  }
  if (xt.size() == 2) {
    const auto outer = [&](double y0) {
      const auto inner = [&](double y1) {
        return boundary_kernel(Tangential{xt[0] - y0, xt[1] - y1}, x.height, t) *
               psi(Tangential{y0, y1});
      };
      return integrate_with_peak(inner, -a, a, xt[1], s);
    };
    return integrate_with_peak(outer, -a, a, xt[0], s);
  }
  throw ConfigError("apply_S2: only N - 1 in {1, 2} is supported");
}

}  // namespace

double apply_S2(const std::function<double(const Tangential&)>& psi, double t,
                const HalfSpacePoint& x, const PointwiseQuadrature& quad) {
  if (!(t >= 0.0)) throw DomainError("apply_S2: t must be >= 0");
  const double s = t + x.height;
  if (!(s > 0.0)) throw DomainError("apply_S2: singular at x_N = t = 0");
  if (quad.boundary_support) {
    if (!(*quad.boundary_support > 0.0)) throw ConfigError("apply_S2: support must be positive");
    return s2_on_box(psi, t, x, *quad.boundary_support);
  }
  const Tangential& xt = x.tangential;
  return integrate_poisson_weighted([&](const Tangential& z) { return psi(xt - z); }, xt.size(),
                                    s, quad.poisson);
}

double apply_S2(const SampledBoundaryField& psi, double t, const HalfSpacePoint& x,
                const PointwiseQuadrature& quad) {
  psi.check();
  return apply_S2([&](const Tangential& y) { return interpolate_boundary(psi, y); }, t, x, quad);
}

double apply_F(const BoundaryTrajectory& flux, const HalfSpacePoint& x, double t,
               const PointwiseQuadrature& quad) {
  require_positive_time(t, "apply_F");
  if (!(x.height > 0.0)) throw DomainError("apply_F: F is evaluated only for x_N > 0");
  const Tangential& xt = x.tangential;
  const std::size_t dim = xt.size();
  const double n1 = static_cast<double>(dim);
  const double first = integrate_poisson_weighted(
      [&](const Tangential& z) { return flux.value_at(xt - z, t); }, dim, x.height, quad.poisson);
  const double second = integrate_time_singular(
      [&](double s) {
        const double sigma = x.height + t - s;
        return integrate_poisson_weighted(
            [&](const Tangential& z) {
              const double r2 = z.norm_squared();
              const double bracket = (r2 - n1 * sigma * sigma) / (r2 + sigma * sigma);
              return bracket / sigma * flux.value_at(xt - z, s);
            },
            dim, sigma, quad.poisson);
      },
      t, with_exponents(quad.time, 0.5, 0.5));
  return first + second;
}

double apply_D(const BoundaryTrajectory& flux, const HalfSpacePoint& x, double t,
               const PointwiseQuadrature& quad) {
  require_positive_time(t, "apply_D");
  return integrate_time_singular(
      [&](double s) {
        const double lag = t - s;
        return integrate_halfspace(
            [&](const HalfSpacePoint& y) {
              if (y.height == 0.0) return 0.0;
              const double g = dirichlet_heat_kernel(x, y, lag);
              return g == 0.0 ? 0.0 : g * apply_F(flux, y, s, quad);
            },
            x, lag, quad.space);
      },
      t, with_exponents(quad.time, 0.5, 0.5));
}

double compute_w(const BoundaryTrajectory& flux, const HalfSpacePoint& x, double t,
                 const PointwiseQuadrature& quad) {
  require_positive_time(t, "compute_w");
  const Tangential& xt = x.tangential;
  return integrate_time_singular(
      [&](double s) {
        const double sigma = x.height + t - s;
        return integrate_poisson_weighted(
            [&](const Tangential& z) { return flux.value_at(xt - z, s); }, xt.size(), sigma,
            quad.poisson);
      },
      t, with_exponents(quad.time, 0.5, 0.0));
}

}  // namespace dynheat
