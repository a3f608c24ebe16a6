#include <string>

#include <doctest.h>

#include "dynheat/config.hpp"
#include "dynheat/errors.hpp"

using namespace dynheat;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_experiment(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("reference experiment") {
  const ExperimentSpec s = reference_experiment();
  CHECK(s.dimension == 2);
  CHECK(s.q == 1.0);
  CHECK(s.p == kInfinity);
  CHECK(s.datum.params.lambda == 1.5);
  CHECK(s.datum.params.profile.kind == TangentialProfile::Kind::gaussian);
  CHECK(s.solver.horizon_T == 1.0);
  CHECK_NOTHROW(s.validate());
  CHECK(s.r_values() == std::vector<double>{1.0, 2.0, kInfinity});
  const InitialDatum phi = s.make_datum();
  REQUIRE(phi.declared_exponents.has_value());
  CHECK(phi.declared_exponents->p == kInfinity);
  REQUIRE(phi.family_params.has_value());
}

TEST_CASE("format and parse round-trip") {
  ExperimentSpec s = reference_experiment();
  s.id = "round";
  s.q = 2.0;
  s.p = 7.5;
  s.r_list = {2.0, 5.0};
  s.datum.params.lambda = 0.8;
  s.datum.params.profile = {TangentialProfile::Kind::box, 0.3};
  s.datum.params.tail = {TailProfile::Kind::zero, 2.0};
  s.solver.grid.hx = 0.125;
  s.solver.output_times = {0.1, 0.3};
  s.oracle.refine = false;
  s.oracle.times = {0.1, 0.3};
  s.estimates.family_lambdas = {1.2, 1.4};
  s.estimates.family_amplitudes = {1.0, 3.0};
  const std::string text = format_experiment(s);
  const ExperimentSpec back = parse_experiment(text);
  CHECK(back.id == "round");
  CHECK(back.q == 2.0);
  CHECK(back.p == 7.5);
  CHECK(back.r_list == s.r_list);
  CHECK(back.datum.params.lambda == 0.8);
  CHECK(back.datum.params.profile.kind == TangentialProfile::Kind::box);
  CHECK(back.datum.params.profile.width == 0.3);
  CHECK(back.datum.params.tail.kind == TailProfile::Kind::zero);
  CHECK(back.solver.grid.hx == 0.125);
  CHECK(back.solver.output_times == s.solver.output_times);
  CHECK_FALSE(back.oracle.refine);
  CHECK(back.estimates.family_amplitudes == s.estimates.family_amplitudes);
  CHECK(format_experiment(back) == text);
  CHECK(format_experiment(parse_experiment(format_experiment(reference_experiment()))) ==
        format_experiment(reference_experiment()));
}

TEST_CASE("partial files keep defaults") {
  const ExperimentSpec s = parse_experiment(
      "# comment\n[experiment]\nid = small   # trailing\n\n[solver]\nhx = 0.2\n[datum]\nkind = zero\n");
  CHECK(s.id == "small");
  CHECK(s.solver.grid.hx == 0.2);
  CHECK(s.solver.grid.hz == reference_experiment().solver.grid.hz);
  CHECK(s.datum.kind == DatumSpec::Kind::zero);
  CHECK(s.make_datum().is_zero());
}

TEST_CASE("errors name the file and line") {
  CHECK(error_of("[solver]\nhx = 0.1\ngrid_spacing = 0.2\n") ==
        "t.cfg:3: unknown key 'grid_spacing' in section [solver]");
  CHECK(error_of("[nonsense]\n").find("t.cfg:1: unknown section [nonsense]") == 0);
  CHECK(error_of("[solver\n").find("t.cfg:1: malformed section header") == 0);
  CHECK(error_of("[solver]\nhx 0.1\n").find("t.cfg:2: expected key = value") == 0);
  CHECK(error_of("hx = 0.1\n").find("t.cfg:1:") == 0);
  CHECK(error_of("[solver]\nhx = fast\n").find("t.cfg:2: hx: expected a number") == 0);
  CHECK(error_of("[oracle]\nrefine = maybe\n").find("t.cfg:2:") == 0);
  CHECK(error_of("[datum]\nkind = spline\n").find("t.cfg:2:") == 0);
  CHECK(error_of("[datum]\nprofile = triangle\n").find("t.cfg:2:") == 0);
}

TEST_CASE("validation") {
  // p must exceed Nq/(N-1)
  CHECK(error_of("[exponents]\nq = 1\np = 1.5\n").find("inadmissible") != std::string::npos);
  CHECK_FALSE(error_of("[exponents]\nq = 2\np = 4\nr = 1\n").empty());
  CHECK_FALSE(error_of("[experiment]\ndimension = 3\n").empty());
  CHECK_FALSE(error_of("[experiment]\nid =\n").empty());
  CHECK_FALSE(error_of("[oracle]\ntimes = 0.5 2\n").empty());
  CHECK_FALSE(error_of("[solver]\npicard_tol = 0\n").empty());
  CHECK_FALSE(error_of("[estimates]\nfamily_lambdas = 1.5 2\nfamily_amplitudes = 1\n").empty());
  CHECK_THROWS_AS(load_experiment("/nonexistent/dir/x.cfg"), ConfigError);
}
