#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dynheat/grid_engine.hpp"
#include "dynheat/norms.hpp"
#include "dynheat/operators.hpp"
#include "dynheat/quadrature.hpp"

namespace dynheat {

/// Cell grid of the N = 2 solver: [-x_half_extent, x_half_extent] x [0, height].
struct PlaneGridSpec {
  double x_half_extent = 6.0;
  double hx = 0.1;
  double height = 5.0;
  double hz = 0.1;
  int datum_subsamples = 3;

  void validate() const;
  PlaneEngine make_engine() const;
};

struct SolverConfig {
  double horizon_T = 1.0;
  double damping_M = 1.0;  // first candidate of the M search
  double damping_cap = 1024.0;
  double contraction_target = 0.55;
  double picard_tol = 1e-4;
  int max_iterations = 40;
  int time_sample_count = 24;
  double min_time_fraction = 1e-4;   // first node at this fraction of T
  std::vector<double> output_times;  // merged into the geometric node set
  double q = 1.0;                    // exponents of X_{T,M} unless the datum declares its own
  double p = kInfinity;
  PlaneGridSpec grid;
  SingularTimeSpec time_rule{0.5, 0.5, 8, 3};

  void validate() const;
  std::vector<double> time_nodes() const;
};

/// Values and x_N-derivatives of a field at every time node, as row fields
/// (row 0 is x_N = 0). normals[n] row 0 is the boundary flux.
struct PlaneState {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> normals;

  std::span<const double> flux(const PlaneEngine& engine, std::size_t n) const {
    return std::span<const double>(normals[n]).first(engine.nx());
  }
};

PlaneState operator-(const PlaneState& a, const PlaneState& b);
PlaneState operator+(const PlaneState& a, const PlaneState& b);

/// The discretized operators on one engine and one time-node set.
class PlaneProblem {
 public:
  PlaneProblem(PlaneEngine engine, std::vector<double> times, SingularTimeSpec rule);

  const PlaneEngine& engine() const noexcept { return engine_; }
  const std::vector<double>& times() const noexcept { return times_; }

  /// S1(t_n) phi and its x_N-derivative at every node; phi is nz x nx cell data.
  PlaneState heat(std::span<const double> phi) const;
  /// F[v](t_n) on the volume cells from the boundary flux history.
  std::vector<std::vector<double>> coupling(const std::vector<std::vector<double>>& flux) const;
  /// D = int_0^t S1(t - s) F(s) ds with F interpolated between nodes.
  PlaneState duhamel(const std::vector<std::vector<double>>& coupling_values) const;
  /// D[v] from the flux history of v.
  PlaneState apply_D(const PlaneState& v) const;
  /// w(t_n) row fields from the flux history.
  std::vector<std::vector<double>> boundary_part(const std::vector<std::vector<double>>& flux) const;

  /// (t_n, E[field](t_n)) for every node.
  std::vector<std::pair<double, double>> energies(const PlaneState& s,
                                                  const WeightedExponentSet& exps) const;
  double xtm(const PlaneState& s, const WeightedExponentSet& exps, double T, double M) const;

  std::vector<std::vector<double>> fluxes(const PlaneState& s) const;

 private:
  struct Bracket {
    std::size_t j;
    double theta;
  };
  Bracket locate(double s) const;
  void lagged_convolution(const std::vector<std::vector<double>>& flux, const Rule1D& rule,
                          double t, double shift, bool derivative, std::span<double> out) const;
  void interpolate(const std::vector<std::vector<double>>& series, double s,
                   std::vector<double>& out) const;

  PlaneEngine engine_;
  std::vector<double> times_;
  std::vector<double> log_times_;
  SingularTimeSpec rule_;
};

struct SolverDiagnostics {
  std::vector<std::pair<double, double>> m_search;  // (M, xtm(D[v0]) / xtm(v0))
  double damping_M = 1.0;
  double contraction_ratio = 0.0;
  std::vector<double> distances;    // xtm(v^{k+1} - v^k), k = 0, 1, ...
  std::vector<double> step_ratios;  // successive distance ratios
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // xtm(v + D[v] - S1 phi) / xtm(S1 phi)
  double v0_norm = 0.0;
  double v_norm = 0.0;
};

struct SolveResult {
  PlaneProblem problem;
  WeightedExponentSet exponents;
  PlaneState v;
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> u;
  SolverDiagnostics diagnostics;

  const std::vector<double>& times() const { return problem.times(); }
  FieldTrajectory v_trajectory() const;
  FieldTrajectory w_trajectory() const;
  FieldTrajectory u_trajectory() const;
  BoundaryTrajectory flux() const;
  std::size_t time_index(double t) const;  // exact node match or ConfigError
};

/// Picard iteration v <- S1 phi - D[v] with M chosen by doubling; N = 2 only.
SolveResult picard_solve(const InitialDatum& phi, const SolverConfig& config);

/// Exponent set used by picard_solve for this datum and config.
WeightedExponentSet solver_exponents(const InitialDatum& phi, const SolverConfig& config);

}  // namespace dynheat
