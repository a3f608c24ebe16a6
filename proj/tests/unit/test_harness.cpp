#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>
#include <json.hpp>

#include "dynheat/errors.hpp"
#include "dynheat/harness.hpp"
#include "dynheat/kernels.hpp"

using namespace dynheat;
namespace fs = std::filesystem;

namespace {

template <class F>
double gk(F f, double a, double b) {
  return b > a ? boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 25, 1e-14) : 0.0;
}

double g1(double z, double t) { return std::exp(-z * z / (4 * t)) / std::sqrt(4 * std::numbers::pi * t); }

}  // namespace

TEST_CASE("damped singular integral: closed forms") {
  // a = b = 1/2, gamma = 0: pi e^{-Mt/2} I0(Mt/2)
  for (double M : {1.0, 8.0, 64.0})
    for (double t : {0.01, 0.3, 1.0}) {
      const double ref = std::numbers::pi * std::exp(-M * t / 2) * boost::math::cyl_bessel_i(0, M * t / 2);
      CHECK(lemma22_integral(0.5, 0.5, 0.0, t, M) == doctest::Approx(ref).epsilon(1e-9));
    }
  // M = 0: t^{gamma + 1 - a - b} B(1 - a, 1 - b)
  for (auto [a, b, g] : {std::tuple{0.25, 0.25, 0.5}, {0.1, 0.6, 0.0}, {0.0, 0.0, 1.0}}) {
    const double t = 0.7;
    const double ref = std::pow(t, g + 1 - a - b) * boost::math::beta(1 - a, 1 - b);
    CHECK(lemma22_integral(a, b, g, t, 0.0) == doctest::Approx(ref).epsilon(1e-9));
  }
  // general M against tanh-sinh
  boost::math::quadrature::tanh_sinh<double> ts;
  const double a = 0.3, b = 0.45, g = 0.2, t = 0.8, M = 20.0;
  const double ref = std::pow(t, g) * ts.integrate(
                                          [&](double s) {
                                            return std::exp(-M * (t - s)) * std::pow(s, -a) * std::pow(t - s, -b);
                                          },
                                          0.0, t);
  CHECK(lemma22_integral(a, b, g, t, M) == doctest::Approx(ref).epsilon(1e-8));
  CHECK_THROWS_AS(lemma22_integral(a, b, g, 0.0, M), DomainError);
}

TEST_CASE("damping search") {
  const Lemma22Result r = check_lemma22(0.25, 0.25, 0.5, 1.0, 0.5);
  CHECK(r.sup <= 0.5);
  CHECK(r.M == r.history.back().first);
  for (std::size_t k = 0; k + 1 < r.history.size(); ++k) {
    CHECK(r.history[k].second > 0.5);
    CHECK(r.history[k + 1].first == 2 * r.history[k].first);
  }
  CHECK(r.curve.size() == 64);

  // a + b = 1, gamma = 0: the sup stays at pi for every M
  try {
    check_lemma22(0.5, 0.5, 0.0, 1.0, 0.5, 64.0);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.history().size() == 7);
    for (double s : e.history()) CHECK(s == doctest::Approx(std::numbers::pi).epsilon(2e-3));
  }
  CHECK_THROWS_AS(check_lemma22(0.7, 0.5, 0.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(check_lemma22(0.2, 0.2, 0.0, 1.0, 0.5, 64.0, 1), ConfigError);
}

TEST_CASE("decay exponent fit") {
  std::vector<std::pair<double, double>> s;
  for (double t : {1e-3, 1e-2, 0.1, 1.0}) s.emplace_back(t, 3.0 * std::pow(t, -0.75));
  const FitResult f = fit_decay_exponent(s);
  CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
  CHECK(f.sample_count == 4);

  s.pop_back();
  CHECK_THROWS_AS(fit_decay_exponent(s), DataError);
  s.emplace_back(1.0, 0.0);
  CHECK_THROWS_AS(fit_decay_exponent(s), DataError);
}

TEST_CASE("moment integrals") {
  for (double t : {0.01, 0.5})
    for (double x : {-0.3, 0.0, 0.4}) {
      // k = j = 0 is the Gaussian tail mass
      CHECK(moment_integral(0, 0, x, t, 1) == doctest::Approx(0.5 * std::erfc(x / (2 * std::sqrt(t)))).epsilon(1e-9));
      CHECK(moment_integral(0, 0, x, t, -1) == doctest::Approx(0.5 * std::erfc(-x / (2 * std::sqrt(t)))).epsilon(1e-9));
      // k = 1: (z / t) G1 = -2 dG1/dz
      if (x >= 0) CHECK(moment_integral(1, 0, x, t, 1) == doctest::Approx(2 * g1(x, t)).epsilon(1e-9));
      // j = 1 in y = u^2, split at the Gaussian peak
      for (int k : {0, 1})
        for (int sign : {-1, 1}) {
          auto f = [&](double u) {
            const double z = x + sign * u * u;
            return 2.0 * std::pow(std::abs(z) / t, k) * g1(z, t);
          };
          const double peak = sign * x < 0 ? std::sqrt(std::abs(x)) : 0.0;
          const double end = std::sqrt(std::abs(x) + 40 * std::sqrt(t));
          const double ref = gk(f, 0.0, peak) + gk(f, peak, end);
          CHECK(moment_integral(k, 1, x, t, sign) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
  CHECK_THROWS_AS(moment_integral(2, 0, 0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(moment_integral(0, 0, 0.0, 0.0, 1), DomainError);
  CHECK_THROWS_AS(moment_integral(0, 0, 0.0, 1.0, 0), DomainError);

  // x well inside sqrt(t): off-centre points scale differently at moderate t
  const double times[] = {1e-4, 1e-3, 1e-2, 0.1};
  const double xs[] = {-1e-4, 0.0, 1e-4};
  const std::vector<MomentResult> m = check_moment_bound(times, xs);
  REQUIRE(m.size() == 4);
  for (const MomentResult& r : m) {
    CHECK_MESSAGE(r.pass, "k=" << r.k << " j=" << r.j << " slope " << r.fit.slope);
    CHECK(r.fit.slope == doctest::Approx(r.expected_slope).epsilon(0.05));
  }
}

TEST_CASE("datum norm and membership") {
  // box profile, zero tail: ||phi||^q = A^q w int_0^1 y^{lambda q} h(y)^{-alpha q} dy
  FamilyParams p;
  p.lambda = 1.0;
  p.amplitude = 2.0;
  p.profile = {TangentialProfile::Kind::box, 0.6};
  p.tail = {TailProfile::Kind::zero, 1.0};
  const WeightedExponentSet e = WeightedExponentSet::make(Dimension(2), 2.0, 8.0);
  const double alpha = alpha_of(Dimension(2), 2.0, 8.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double normal =
      ts.integrate([&](double y) { return std::pow(y, 2 * (p.lambda - alpha)) * std::pow(y + 1, 2 * alpha); }, 0.0, 1.0);
  CHECK(datum_weighted_norm(InitialDatum::family(p), e, 4.0, 4.0) ==
        doctest::Approx(2.0 * std::sqrt(0.6 * normal)).epsilon(1e-9));
  // finite iff lambda q - alpha q > -1
  CHECK(e.lambda_threshold() == doctest::Approx(alpha - 0.5));
  p.lambda = alpha - 0.5 - 0.1;
  CHECK(datum_weighted_norm(InitialDatum::family(p), e, 4.0, 4.0) == kInfinity);
  CHECK(datum_weighted_norm(InitialDatum::zero(), e, 4.0, 4.0) == 0.0);

  const WeightedExponentSet e1 = WeightedExponentSet::make(Dimension(2), 1.0, kInfinity);
  for (double lambda : {0.5, 1.5}) {
    const MembershipResult m = membership_refinement_test(lambda, e1);
    CHECK(m.threshold == doctest::Approx(alpha_of(Dimension(2), 1.0, kInfinity) - 1.0));
    CHECK(m.member == (lambda > m.threshold));
    CHECK(m.agree);
    CHECK(m.norms.size() == 3);
  }
  CHECK_THROWS_AS(membership_refinement_test(1.5, e1, 2), ConfigError);
}

TEST_CASE("reports") {
  Report r;
  r.id = "unit_report";
  const std::vector<std::pair<double, double>> series{{0.1, 1.0}, {0.2, 0.5}};
  r.add_series("u", series);
  r.scalars.emplace_back("slope", -0.5);
  r.checks.push_back({"ok", true, ""});
  CHECK(r.pass());
  Report other;
  other.checks.push_back({"bad", false, "too large"});
  r.merge(other);
  CHECK_FALSE(r.pass());
  CHECK(r.rows.size() == 2);

  const fs::path dir = fs::temp_directory_path() / "dynheat_report_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_report(r, dir);
  std::ifstream csv(dir / "unit_report.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "quantity,t,value");
  std::getline(csv, line);
  CHECK(line.rfind("u,0.1", 0) == 0);
  std::ifstream js(dir / "unit_report.json");
  const nlohmann::json j = nlohmann::json::parse(js);
  CHECK(j.at("scalars").at("slope") == -0.5);
  CHECK(j.at("checks").size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("invariant suites pass") {
  const Report k = kernel_invariants();
  for (const Check& c : k.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
  const Report s = semigroup_invariants();
  for (const Check& c : s.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
  CHECK(!s.checks.empty());
}
