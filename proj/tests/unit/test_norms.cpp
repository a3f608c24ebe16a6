#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "dynheat/errors.hpp"
#include "dynheat/norms.hpp"

using namespace dynheat;

namespace {

// [-1, 1] x (0, 2] with n cells per unit
SampledField unit_box_indicator(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n);
  return sample_field(
      [](const HalfSpacePoint& x) {
        return (x.tangential[0] > 0.0 && x.tangential[0] < 1.0 && x.height < 1.0) ? 1.0 : 0.0;
      },
      {CellAxis::covering(-1.0, 1.0, h)}, CellAxis::covering(0.0, 2.0, h));
}

SampledField random_field(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  SampledField f{{CellAxis{-1.0, 0.1, 20}}, CellAxis{0.0, 0.05, 30}, {}};
  f.values.resize(f.size());
  for (double& v : f.values) v = g(rng);
  return f;
}

}  // namespace

TEST_CASE("weight h") {
  CHECK(weight_h(0.0) == 0.0);
  CHECK(weight_h(1.0) == 0.5);
  CHECK(weight_h(1e6) >= 1.0 - 2e-6);
  CHECK(weight_h(kInfinity) == 1.0);
  CHECK_THROWS_AS(weight_h(-1e-9), DomainError);
}

TEST_CASE("exponent bookkeeping") {
  CHECK(alpha_of(Dimension(2), 1.0, kInfinity) == 2.0);
  CHECK(alpha_of(Dimension(3), 2.0, 4.0) == doctest::Approx(1.0));
  for (double q : {1.0, 1.5, 3.0}) CHECK(alpha_of(Dimension(2), q, q) == doctest::Approx(1.0 / q));
  CHECK_THROWS_AS(alpha_of(Dimension(2), 2.0, 1.5), DomainError);

  const auto e = WeightedExponentSet::make(Dimension(2), 1.0, kInfinity, 2.0);
  CHECK(e.alpha_r == doctest::Approx(1.5));
  CHECK(e.time_exponent() == doctest::Approx(1.0));
  CHECK(e.lambda_threshold() == doctest::Approx(1.0));
  CHECK(WeightedExponentSet::make(Dimension(3), 2.0, 4.0).lambda_threshold() == doctest::Approx(0.5));

  CHECK_THROWS_AS(WeightedExponentSet::make(Dimension(2), 1.0, 2.0), ConfigError);  // p must exceed 2
  CHECK_NOTHROW(WeightedExponentSet::make(Dimension(2), 1.0, 2.001));
  CHECK_THROWS_AS(WeightedExponentSet::make(Dimension(3), 2.0, 3.0), ConfigError);
  CHECK_THROWS_AS(WeightedExponentSet::make(Dimension(2), kInfinity, 10.0), ConfigError);
  CHECK_NOTHROW(WeightedExponentSet::make(Dimension(2), kInfinity, kInfinity));
  CHECK_THROWS_AS(WeightedExponentSet::make(Dimension(2), 2.0, 8.0, 1.0), ConfigError);
  CHECK_THROWS_AS(WeightedExponentSet::make(Dimension(2), 0.5, kInfinity), ConfigError);

  CHECK(default_r_set(1.0, kInfinity) == std::vector<double>{1.0, 2.0, kInfinity});
  CHECK(default_r_set(2.0, 4.0) == std::vector<double>{2.0, 8.0 / 3.0, 4.0});
  CHECK(default_r_set(kInfinity, kInfinity) == std::vector<double>{kInfinity});
}

TEST_CASE("lebesgue norms of simple fields") {
  const SampledField box = unit_box_indicator(16);
  for (double r : {1.0, 2.0, 3.5, 10.0, kInfinity}) CHECK(lp_norm(box, r) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(weighted_lq_norm(box, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));

  SampledField zero = box;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  CHECK(lp_norm(zero, 2.0) == 0.0);
  CHECK(weighted_lq_norm(zero, 1.0, 3.0) == 0.0);

  const SampledBoundaryField b = sample_boundary(
      [](const Tangential& y) { return std::abs(y[0]) < 0.5 ? 1.0 : 0.0; }, {CellAxis{-2.0, 0.125, 32}});
  for (double r : {1.0, 2.0, kInfinity}) CHECK(lp_norm(b, r) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(lp_norm(b, 1.5) == doctest::Approx(1.0).epsilon(1e-13));

  // q = inf drops the weight
  CHECK(weighted_lq_norm(box, kInfinity, 5.0) == 1.0);
}

TEST_CASE("weighted norm against an independent quadrature") {
  // f = 1 on (0, 1)^2: int_0^1 h(x)^{-alpha q} dx, alpha q = 1/4 so the
  // singularity is mild; the midpoint rule converges like h^{3/4}
  const double alpha = 0.25;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double exact = ts.integrate([&](double x) { return std::pow((x + 1.0) / x, alpha); }, 0.0, 1.0);
  const SampledField f = sample_field([](const HalfSpacePoint&) { return 1.0; }, {CellAxis{0.0, 0.1, 10}},
                                      CellAxis{0.0, 1e-4, 10000});
  CHECK(weighted_lq_norm(f, 1.0, alpha) == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("weight overflow names the sample") {
  SampledField f{{CellAxis{0.0, 1.0, 2}}, CellAxis{0.0, 1e-3, 3}, std::vector<double>(6, 1.0)};
  try {
    weighted_lq_norm(f, 1.0, 400.0);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("row 0") != std::string::npos);
  }
  f.values[0] = f.values[1] = 0.0;  // zero samples are skipped, the next row still overflows
  try {
    weighted_lq_norm(f, 1.0, 400.0);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("norm axioms on random fields") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SampledField f = random_field(rng), g = random_field(rng);
    SampledField sum = f, scaled = f;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      sum.values[i] = f.values[i] + g.values[i];
      scaled.values[i] = -3.5 * f.values[i];
    }
    for (double r : {1.0, 2.0, 3.5, kInfinity}) {
      CHECK(lp_norm(f, r) >= 0.0);
      CHECK(lp_norm(scaled, r) == doctest::Approx(3.5 * lp_norm(f, r)).epsilon(1e-10));
      CHECK(lp_norm(sum, r) <= lp_norm(f, r) + lp_norm(g, r) + 1e-10);
    }
    for (double q : {1.0, 2.0}) {
      CHECK(weighted_lq_norm(scaled, q, 0.7) == doctest::Approx(3.5 * weighted_lq_norm(f, q, 0.7)).epsilon(1e-10));
      CHECK(weighted_lq_norm(sum, q, 0.7) <= weighted_lq_norm(f, q, 0.7) + weighted_lq_norm(g, q, 0.7) + 1e-10);
      // monotone in alpha, exactly: h <= 1 on every cell
      double last = 0.0;
      for (double a : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        const double v = weighted_lq_norm(f, q, a);
        CHECK(v >= last);
        last = v;
      }
    }
  }
}

TEST_CASE("energy functional") {
  const auto e = WeightedExponentSet::make(Dimension(2), 1.0, kInfinity);
  EnergyRecord zero{0.3, 0.0, 0.0, {{1.0, 0.0}, {2.0, 0.0}, {kInfinity, 0.0}}};
  CHECK(energy_functional(zero, e) == 0.0);

  const EnergyRecord r{0.25, 2.0, 3.0, {{1.0, 1.0}, {2.0, 4.0}, {kInfinity, 2.0}}};
  // t^1 (2 + 0.5 * 3) + 0.5 * 4
  CHECK(energy_functional(r, e) == doctest::Approx(0.25 * 3.5 + 2.0));
  EnergyRecord twice = r;
  twice.v_lp *= 2;
  twice.dv_lp *= 2;
  for (auto& [rr, v] : twice.boundary_dv) v *= 2;
  CHECK(energy_functional(twice, e) == doctest::Approx(2.0 * energy_functional(r, e)));

  // q = p is admissible only at infinity; the prefactor is then 1
  const auto eqp = WeightedExponentSet::make(Dimension(2), kInfinity, kInfinity);
  CHECK(eqp.time_exponent() == 0.0);
  CHECK(energy_functional(EnergyRecord{0.01, 1.0, 0.0, {{kInfinity, 0.0}}}, eqp) == 1.0);

  CHECK_THROWS_AS(energy_functional(EnergyRecord{0.3, 1.0, 1.0, {}}, e), ConfigError);
}

TEST_CASE("damped sup norm") {
  std::vector<std::pair<double, double>> c;
  for (int k = 1; k <= 10; ++k) c.emplace_back(0.1 * k, 1.7);
  CHECK(xtm_norm(c, DampedNormParams{1.0, 0.0}) == 1.7);

  std::vector<std::pair<double, double>> one;
  for (int k = 1; k <= 10; ++k) one.emplace_back(0.1 * k, 1.0);
  CHECK(xtm_norm(one, DampedNormParams{1.0, 100.0}) <= std::exp(-10.0) * (1 + 1e-15));

  const std::pair<double, double> single[] = {{1.0, 2.0}};
  CHECK(xtm_norm(single, DampedNormParams{1.0, 1.0}) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-15));

  CHECK_THROWS_AS(xtm_norm(std::vector<std::pair<double, double>>{}, DampedNormParams{}), ConfigError);
  CHECK_THROWS_AS(xtm_norm(single, DampedNormParams{0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(xtm_norm(single, DampedNormParams{0.0, 1.0}), ConfigError);
}

TEST_CASE("membership criterion") {
  const auto e = WeightedExponentSet::make(Dimension(2), 1.0, kInfinity);
  CHECK(membership_criterion(2.0, e));
  CHECK_FALSE(membership_criterion(0.5, e));
  CHECK_FALSE(membership_criterion(1.0, e));  // strict at the threshold
  CHECK(membership_criterion(1.0 + 1e-9, e));
}
