#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynheat/config.hpp"
#include "dynheat/solver.hpp"

namespace dynheat {

/// Least-squares line through (log t, log norm).
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max absolute log residual
  int sample_count = 0;
};

FitResult fit_decay_exponent(std::span<const std::pair<double, double>> samples);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// One CSV row per (quantity, t); scalars and checks go to the JSON summary.
struct Report {
  std::string id;
  struct Row {
    std::string quantity;
    double t;
    double value;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<Check> checks;

  bool pass() const;
  void add_series(const std::string& quantity, std::span<const std::pair<double, double>> series);
  void merge(const Report& other);
};

/// Writes <dir>/<id>.csv and <dir>/<id>.json.
void write_report(const Report& report, const std::filesystem::path& dir);

// ---------------------------------------------------------------- invariants

/// Kernel identities on a fixed point set, N = 2 and 3: Dirichlet boundary
/// vanishing, product form of the Dirichlet kernel, boundary trace of K,
/// d_t P against a central difference, and unit mass of P.
Report kernel_invariants();

/// Shift and semigroup laws of S2 on a smooth compactly supported psi, against
/// direct adaptive quadrature of the boundary integral (N = 2).
Report semigroup_invariants(double tolerance = 1e-6);

// ---------------------------------------------------------------- smoothing

enum class SmoothingOp { S1, dxN_S1_boundary, S2 };

struct SmoothingCase {
  SmoothingOp op = SmoothingOp::S1;
  double q = 1.0;
  double r = kInfinity;
  InitialDatum datum;                                 // S1 and dxN_S1_boundary
  std::function<double(const Tangential&)> boundary;  // S2
  std::vector<double> times;
  PlaneGridSpec grid;
  double tolerance = 0.1;
};

struct SmoothingResult {
  std::vector<std::pair<double, double>> samples;  // (t, norm)
  FitResult fit;
  double expected_slope = 0.0;
  double sup_ratio = 0.0;        // sup_t norm(t) / norm(datum) when q = r
  double scaled_variation = 0.0;  // max/min of t^{1/2} norm (boundary trace only)
  double rescaling_spread = 0.0;  // constant drift when the datum is doubled
  bool pass = false;
  std::string detail;
};

SmoothingResult verify_smoothing(const SmoothingCase& c);

/// Data and grids for which each smoothing rate is sharp: concentrated data
/// for q = 1, a power law just inside L^2 for q = 2, and box data with
/// x_N^lambda profiles for the boundary trace.
std::vector<SmoothingCase> reference_smoothing_cases();


// ---------------------------------------------------------------- damped singular integral

/// e^{-Mt} t^gamma int_0^t e^{Ms} s^{-a} (t - s)^{-b} ds.
double lemma22_integral(double a, double b, double gamma, double t, double M);

struct Lemma22Result {
  double M = 0.0;
  double sup = 0.0;
  std::vector<std::pair<double, double>> history;  // (M, sup over the t grid)
  std::vector<std::pair<double, double>> curve;    // (t, value) at the returned M
};

/// Smallest power-of-two M with sup_{0<t<T} (...) <= delta on a log-spaced t
/// grid; throws SolverFailure carrying the sup history once M passes `cap`.
Lemma22Result check_lemma22(double a, double b, double gamma, double T, double delta,
                            double cap = 1048576.0, int grid_points = 64);

// ---------------------------------------------------------------- data norms

/// ||phi||_{L^q_alpha(p)}; separable quadrature for family data, else a fine
/// midpoint sample of [-L, L] x (0, H].
double datum_weighted_norm(const InitialDatum& phi, const WeightedExponentSet& exps, double L,
                           double H);

struct MembershipResult {
  double lambda = 0.0;
  double threshold = 0.0;
  std::vector<double> norms;  // q-th powers at successive refinements of x_N
  bool diverges = false;      // refinement verdict
  bool member = false;        // membership_criterion verdict
  bool agree = false;
};

/// Phi(x') x_N^lambda on (0, 1]: increments of the discrete norm under x_N
/// refinement shrink iff the weighted norm is finite.
MembershipResult membership_refinement_test(double lambda, const WeightedExponentSet& exps,
                                            int levels = 3, std::size_t base_cells = 64);

// ---------------------------------------------------------------- moment bound

/// int_0^inf (|x + sign y| / t)^k G1(x + sign y, t) y^{-j/2} dy.
double moment_integral(int k, int j, double x, double t, int sign);

struct MomentResult {
  int k = 0;
  int j = 0;
  std::vector<std::pair<double, double>> samples;  // (t, sup over x and sign)
  FitResult fit;
  double expected_slope = 0.0;
  bool pass = false;
};

std::vector<MomentResult> check_moment_bound(std::span<const double> times,
                                             std::span<const double> xs, double tolerance = 0.05);

// ---------------------------------------------------------------- solution bounds

struct Theorem11Member {
  FamilyParams params;
  double datum_norm = 0.0;
  std::vector<std::pair<std::string, double>> sups;  // quantity -> sup_t value / datum norm
  SolverDiagnostics diagnostics;
};

struct Theorem11Report {
  std::vector<Theorem11Member> members;
  std::vector<std::pair<std::string, double>> constants;  // fitted C_T per quantity
  std::vector<std::pair<std::string, double>> spreads;    // max / min across members
  bool bounds_pass = false;
  std::vector<std::pair<double, double>> w_samples;  // (t, ||w(t)||_{L^p})
  FitResult w_fit;
  bool w_pass = false;
  Report report;
};

/// (t, quantity) series of both displays of the solution bound.
std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> solution_quantities(
    const SolveResult& result, std::span<const double> r_values);

Theorem11Report verify_theorem11(const ExperimentSpec& spec);

// ---------------------------------------------------------------- oracle

struct OracleLevel {
  double h = 0.0;
  double dx = 0.0;
  std::vector<double> times;
  std::vector<double> max_gap;  // relative to max |u_fd| on the window
  std::vector<double> l2_gap;   // relative L^2 gap on the window
  double worst_gap = 0.0;
  int iterations = 0;
};

struct OracleReport {
  std::vector<OracleLevel> levels;
  double refinement_factor = 0.0;  // worst gap ratio between the first two levels
  bool pass = false;
  Report report;
};

OracleReport compare_with_oracle(const ExperimentSpec& spec, double gap_tolerance = 0.05,
                                 double refinement_target = 1.7);

}  // namespace dynheat
