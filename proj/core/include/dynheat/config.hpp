#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dynheat/fd_oracle.hpp"
#include "dynheat/operators.hpp"
#include "dynheat/solver.hpp"

namespace dynheat {

struct DatumSpec {
  enum class Kind { family, zero };
  Kind kind = Kind::family;
  FamilyParams params;

  InitialDatum make(const WeightedExponentSet& exps) const;
};

struct OracleSpec {
  FDGrid grid;
  bool refine = true;               // also run both solvers at half the spacing
  double window_tangential = 0.6;   // fraction of the tangential half-extent compared
  double window_height = 0.8;       // fraction of the height compared
  std::vector<double> times{0.1, 0.25, 0.5, 1.0};
};

struct EstimateSpec {
  std::vector<double> family_lambdas{1.5, 2.0, 1.5};
  std::vector<double> family_amplitudes{1.0, 1.0, 2.0};
  double stability_factor = 3.0;
  // datum for the w-smallness fit: flux ~ s^{-1/2} needs a concentrated Phi
  double w_lambda = 1.05;
  TangentialProfile w_profile{TangentialProfile::Kind::box, 0.2};
  double w_fit_min = 0.01;
  double w_fit_max = 0.2;
};

/// One experiment as read from a config file.
struct ExperimentSpec {
  std::string id = "reference";
  int dimension = 2;
  double q = 1.0;
  double p = kInfinity;
  std::vector<double> r_list;  // empty: the default r set
  DatumSpec datum;
  SolverConfig solver;
  OracleSpec oracle;
  EstimateSpec estimates;
  std::filesystem::path output_dir = "dynheat-out";

  /// Admissibility and field checks; throws ConfigError.
  void validate() const;
  WeightedExponentSet exponents() const;
  InitialDatum make_datum() const { return datum.make(exponents()); }
  std::vector<double> r_values() const;
};

/// The reference case: N = 2, q = 1, p = inf, lambda = 1.5, Gaussian Phi, T = 1.
ExperimentSpec reference_experiment();

/// Flat "key = value" text with [section] headers and # comments. Unknown
/// sections or keys are errors; `source` prefixes error messages.
ExperimentSpec parse_experiment(std::string_view text, const std::string& source = "<config>");
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Text that parse_experiment maps back to `spec`.
std::string format_experiment(const ExperimentSpec& spec);

}  // namespace dynheat
