#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include "dynheat/errors.hpp"
#include "dynheat/operators.hpp"

using namespace dynheat;
using std::numbers::pi;

namespace {

// phi = exp(-x^2/4a) y exp(-y^2/4a); odd in y, so the Dirichlet flow is the
// free one: (a/(a+t))^2 y exp(-(x^2 + y^2)/4(a+t))
constexpr double a = 0.5;

InitialDatum gaussian_dipole() {
  return InitialDatum::from_function([](const HalfSpacePoint& y) {
    const double x = y.tangential[0], h = y.height;
    return h * std::exp(-(x * x + h * h) / (4 * a));
  });
}

double dipole_S1(double x, double h, double t) {
  const double b = a + t;
  return (a / b) * (a / b) * h * std::exp(-(x * x + h * h) / (4 * b));
}

double dipole_dxN_S1(double x, double h, double t) {
  const double b = a + t;
  return (a / b) * (a / b) * (1 - h * h / (2 * b)) * std::exp(-(x * x + h * h) / (4 * b));
}

HalfSpacePoint pt(double x, double h) { return HalfSpacePoint(Tangential{x}, h); }

// spatially constant on [-1e12, 1e12]; the edges sit closer to theta = +-pi/2
// than any quadrature node, so the field looks constant to every rule
BoundaryTrajectory constant_flux(std::vector<double> c, std::vector<double> times = {1e-3, 0.1, 1.0}) {
  BoundaryTrajectory f;
  f.times = times;
  for (double v : c) f.values.push_back(SampledBoundaryField{{CellAxis{-1e12, 1e12, 2}}, {v, v}});
  return f;
}

PointwiseQuadrature coarse() {
  PointwiseQuadrature q;
  q.space = {8.0, 16, SpatialScheme::gauss_legendre_composite};
  q.poisson = {8.0, 16, SpatialScheme::gauss_legendre_composite};
  q.time = {0.5, 0.5, 8, 2};
  return q;
}

}  // namespace

TEST_CASE("S1 and its normal derivative against the dipole solution") {
  const InitialDatum phi = gaussian_dipole();
  PointwiseQuadrature fine;
  fine.space.nodes_per_dimension = 96;  // 48 already gives ~4e-7 at t = 1
  for (double t : {0.1, 1.0})
    for (auto [x, h] : {std::pair{0.0, 0.5}, {1.0, 2.0}, {-0.3, 0.05}}) {
      CHECK(apply_S1(phi, t, pt(x, h), fine) == doctest::Approx(dipole_S1(x, h, t)).epsilon(1e-10));
      CHECK(apply_dxN_S1(phi, t, pt(x, h), fine) == doctest::Approx(dipole_dxN_S1(x, h, t)).epsilon(1e-10));
      CHECK(apply_S1(phi, t, pt(x, h)) == doctest::Approx(dipole_S1(x, h, t)).epsilon(1e-6));

      const double d = 1e-3 * std::sqrt(t);
      const double fd = (apply_S1(phi, t, pt(x, h + d)) - apply_S1(phi, t, pt(x, h - d))) / (2 * d);
      CHECK(fd == doctest::Approx(apply_dxN_S1(phi, t, pt(x, h))).epsilon(1e-5));
    }
  // boundary trace through the product form of K at x_N = 0
  for (double x : {0.0, 0.7, -2.0})
    CHECK(apply_dxN_S1(phi, 0.3, pt(x, 0.0), fine) == doctest::Approx(dipole_dxN_S1(x, 0.0, 0.3)).epsilon(1e-10));

  CHECK(apply_S1(phi, 0.3, pt(0.4, 0.0)) == 0.0);
  CHECK(apply_S1(InitialDatum::zero(), 0.3, pt(0.4, 1.0)) == 0.0);
  CHECK(apply_dxN_S1(InitialDatum::zero(), 0.3, pt(0.4, 0.0)) == 0.0);
  CHECK_THROWS_AS(apply_S1(phi, 0.0, pt(0, 1)), DomainError);
}

TEST_CASE("S2 on closed-form data") {
  auto one = [](const Tangential&) { return 1.0; };
  auto cauchy = [](const Tangential& y) { return 1.0 / (1.0 + y[0] * y[0]); };
  for (double t : {0.01, 0.5, 4.0})
    for (auto [x, h] : {std::pair{0.0, 0.0}, {2.0, 0.3}, {-7.0, 1.5}}) {
      CHECK(apply_S2(one, t, pt(x, h)) == doctest::Approx(1.0).epsilon(1e-12));
      const double s = h + t + 1.0;
      CHECK(apply_S2(cauchy, t, pt(x, h)) == doctest::Approx(s / (s * s + x * x)).epsilon(1e-10));
      // the shift identity holds by construction
      CHECK(apply_S2(cauchy, t, pt(x, h)) == apply_S2(cauchy, t + h, pt(x, 0.0)));
    }
  // N = 3: P(., s) * P(., 1) = P(., s + 1) with (1 + |y|^2)^{-3/2} = 2 pi P(y, 0, 1)
  auto cauchy3 = [](const Tangential& y) { return std::pow(1.0 + y.norm_squared(), -1.5); };
  const HalfSpacePoint x3(Tangential{0.5, -1.0}, 0.2);
  const double s3 = 0.2 + 0.3 + 1.0;
  CHECK(apply_S2(cauchy3, 0.3, x3) ==
        doctest::Approx(2 * pi * boundary_kernel(Tangential{0.5, -1.0}, 0.0, s3)).epsilon(1e-6));

  // P is positive
  CHECK(apply_S2([](const Tangential& y) { return std::exp(-y[0] * y[0]); }, 0.2, pt(30.0, 0.0)) > 0.0);
  CHECK_THROWS_AS(apply_S2(one, 0.0, pt(0.0, 0.0)), DomainError);
}

TEST_CASE("S2 with a support box finds data far from the kernel peak") {
  auto box = [](const Tangential& y) { return std::abs(y[0]) < 1.0 ? 1.0 : 0.0; };
  PointwiseQuadrature q;
  q.boundary_support = 1.0;
  for (double x : {0.0, 5.0, 40.0})
    for (double s : {0.01, 0.1, 2.0}) {
      const double exact = (std::atan((x + 1) / s) - std::atan((x - 1) / s)) / pi;
      CHECK(apply_S2(box, s, pt(x, 0.0), q) == doctest::Approx(exact).epsilon(1e-10));
    }
  q.boundary_support = 0.0;
  CHECK_THROWS_AS(apply_S2(box, 0.1, pt(0.0, 0.0), q), ConfigError);
}

TEST_CASE("sampled boundary data are interpolated linearly between centres") {
  // the hat 1 - |y| has its kinks on cell centres, so interpolation is exact
  auto hat = [](const Tangential& y) { return std::max(0.0, 1.0 - std::abs(y[0])); };
  const SampledBoundaryField psi = sample_boundary(hat, {CellAxis{-2.05, 0.1, 41}});
  PointwiseQuadrature q;
  q.boundary_support = 2.05;
  for (double x : {0.0, 0.35, 3.0})
    CHECK(apply_S2(psi, 0.2, pt(x, 0.1), q) == doctest::Approx(apply_S2(hat, 0.2, pt(x, 0.1), q)).epsilon(1e-10));
}

TEST_CASE("boundary trajectories") {
  BoundaryTrajectory f;
  f.times = {0.1, 1.0};
  f.values = {SampledBoundaryField{{CellAxis{-1, 1, 2}}, {1, 1}}, SampledBoundaryField{{CellAxis{-1, 1, 2}}, {2, 2}}};
  CHECK(f.value_at(Tangential{0.0}, std::sqrt(0.1)) == doctest::Approx(1.5).epsilon(1e-14));  // linear in log t
  CHECK(f.value_at(Tangential{0.0}, 1e-6) == 1.0);
  CHECK(f.value_at(Tangential{0.0}, 5.0) == 2.0);
  CHECK(f.value_at(Tangential{3.0}, 0.5) == 0.0);
  f.times = {0.1, 0.1};
  CHECK_THROWS_AS(f.check(), ConfigError);
  f.times = {0.0, 1.0};
  CHECK_THROWS_AS(f.check(), ConfigError);
}

TEST_CASE("coupling operators on a spatially constant flux") {
  const BoundaryTrajectory zero = constant_flux({0.0, 0.0, 0.0});
  const BoundaryTrajectory c = constant_flux({1.5, 1.5, 1.5});

  // int P = 1 at every time, so the d_t P term integrates to zero
  for (double t : {0.05, 0.5})
    for (double h : {0.01, 0.3, 2.0}) {
      CHECK(apply_F(zero, pt(0.2, h), t) == 0.0);
      CHECK(apply_F(c, pt(0.2, h), t) == doctest::Approx(1.5).epsilon(1e-5));
      CHECK(compute_w(zero, pt(0.2, h), t) == 0.0);
      CHECK(compute_w(c, pt(0.2, h), t) == doctest::Approx(1.5 * t).epsilon(1e-5));
    }
  CHECK_THROWS_AS(apply_F(c, pt(0.0, 0.0), 0.5), DomainError);

  // D = 1.5 int_0^t erf(x_N / 2 sqrt(tau)) d tau
  const PointwiseQuadrature q = coarse();
  for (double h : {0.2, 1.0}) {
    const double t = 0.5;
    const double exact = 1.5 * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                   [h](double tau) { return tau > 0 ? std::erf(h / (2 * std::sqrt(tau))) : 1.0; },
                                   0.0, t, 15, 1e-13);
    CHECK(apply_D(c, pt(0.0, h), t, q) == doctest::Approx(exact).epsilon(2e-3));
  }
}

TEST_CASE("coupling operators are linear in the flux") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_flux = [&] {
    BoundaryTrajectory f;
    f.times = {0.01, 0.1, 0.5};
    for (int k = 0; k < 3; ++k) {
      SampledBoundaryField b{{CellAxis{-3.0, 0.5, 12}}, std::vector<double>(12)};
      for (double& v : b.values) v = u(rng);
      f.values.push_back(b);
    }
    return f;
  };
  auto combine = [](const BoundaryTrajectory& f1, const BoundaryTrajectory& f2) {
    BoundaryTrajectory mix = f1;
    for (std::size_t k = 0; k < mix.values.size(); ++k)
      for (std::size_t i = 0; i < mix.values[k].values.size(); ++i)
        mix.values[k].values[i] = 2.0 * f1.values[k].values[i] - 0.5 * f2.values[k].values[i];
    return mix;
  };
  auto close = [](double lhs, double rhs) { return std::abs(lhs - rhs) <= 1e-8 * (std::abs(rhs) + 1e-3); };

  const PointwiseQuadrature q = coarse();
  const BoundaryTrajectory f1 = random_flux(), f2 = random_flux(), mix = combine(f1, f2);
  for (double x : {0.3, 2.0}) {
    const HalfSpacePoint y = pt(x, 0.4);
    CHECK(close(apply_F(mix, y, 0.3, q), 2.0 * apply_F(f1, y, 0.3, q) - 0.5 * apply_F(f2, y, 0.3, q)));
    CHECK(close(compute_w(mix, y, 0.3, q), 2.0 * compute_w(f1, y, 0.3, q) - 0.5 * compute_w(f2, y, 0.3, q)));
  }

  // D on time-varying, spatially constant fluxes (the nested quadrature is
  // too costly for fluxes with kinks)
  const BoundaryTrajectory g1 = constant_flux({1.0, 2.0, -1.0}), g2 = constant_flux({0.5, -3.0, 2.0});
  const BoundaryTrajectory gmix = combine(g1, g2);
  const HalfSpacePoint x = pt(0.3, 0.4);
  CHECK(close(apply_D(gmix, x, 0.4, q), 2.0 * apply_D(g1, x, 0.4, q) - 0.5 * apply_D(g2, x, 0.4, q)));

  // positive flux gives positive w
  BoundaryTrajectory pos = f1;
  for (auto& b : pos.values)
    for (double& v : b.values) v = std::abs(v);
  for (double xx : {-4.0, 0.0, 2.5}) CHECK(compute_w(pos, pt(xx, 0.0), 0.3, q) > 0.0);
}

TEST_CASE("family data") {
  FamilyParams p;
  p.lambda = 1.5;
  p.amplitude = 2.0;
  p.profile = {TangentialProfile::Kind::gaussian, 1.0};
  p.tail = {TailProfile::Kind::gaussian, 1.0};
  const InitialDatum phi = InitialDatum::family(p);
  REQUIRE(phi.family_params.has_value());
  for (double h : {0.01, 0.5, 1.0}) {
    const double expect = 2.0 * p.profile(Tangential{0.3}) * std::pow(h, 1.5);
    CHECK(phi(pt(0.3, h)) == doctest::Approx(expect).epsilon(1e-14));
  }
  // continuous across x_N = 1 and decaying beyond
  CHECK(phi(pt(0.3, 1.0 + 1e-9)) == doctest::Approx(phi(pt(0.3, 1.0))).epsilon(1e-8));
  CHECK(phi(pt(0.3, 4.0)) < phi(pt(0.3, 2.0)));
  CHECK(InitialDatum::zero().is_zero());
  CHECK(TangentialProfile::parse("box") == TangentialProfile::Kind::box);
  CHECK(TangentialProfile::name(TangentialProfile::Kind::bump) == "bump");
  CHECK_THROWS_AS(TangentialProfile::parse("triangle"), ConfigError);
  CHECK_THROWS_AS(TailProfile::parse("cubic"), ConfigError);
}
