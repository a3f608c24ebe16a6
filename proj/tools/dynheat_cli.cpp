// dynheat: kernel solver and estimate checks for the heat equation on a
// half-space with a dynamical boundary condition.
//
// Exit codes: 0 all requested checks pass, 1 a check failed or the solver
// did not converge, 2 bad usage or configuration.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynheat/config.hpp"
#include "dynheat/errors.hpp"
#include "dynheat/field_io.hpp"
#include "dynheat/harness.hpp"
#include "dynheat/solver.hpp"

namespace fs = std::filesystem;
using namespace dynheat;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void print_checks(const Report& report) {
  for (const auto& c : report.checks)
    std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  " << c.detail << '\n';
}

int finish(const Report& report, const fs::path& dir) {
  print_checks(report);
  write_report(report, dir);
  std::cout << "wrote " << (dir / (report.id + ".json")).string() << '\n';
  return report.pass() ? kPass : kFail;
}

Report smoothing_report() {
  Report rep;
  rep.id = "smoothing";
  for (const auto& c : reference_smoothing_cases()) {
    const SmoothingResult r = verify_smoothing(c);
    rep.checks.push_back({"smoothing", r.pass, r.detail});
    rep.add_series(r.detail, r.samples);
  }
  return rep;
}

Report moment_report() {
  Report rep;
  rep.id = "moment_bound";
  const std::vector<double> times{0.1, 0.316227766016838, 1.0, 3.16227766016838, 10.0};
  const std::vector<double> xs{0.01, 0.1, 1.0, 10.0};
  for (const auto& m : check_moment_bound(times, xs)) {
    const std::string name = "moment_k" + std::to_string(m.k) + "_j" + std::to_string(m.j);
    std::ostringstream os;
    os << "slope " << m.fit.slope << ", expected " << m.expected_slope;
    rep.checks.push_back({name, m.pass, os.str()});
    rep.add_series(name, m.samples);
    rep.scalars.emplace_back(name + "_slope", m.fit.slope);
  }
  return rep;
}

int run_solve(const ExperimentSpec& spec, const fs::path& out) {
  const SolveResult result = picard_solve(spec.make_datum(), spec.solver);
  fs::create_directories(out);
  write_field_dump(out / (spec.id + "_v"), "v", result.v_trajectory());
  write_field_dump(out / (spec.id + "_w"), "w", result.w_trajectory());
  write_field_dump(out / (spec.id + "_u"), "u", result.u_trajectory());

  const auto& d = result.diagnostics;
  nlohmann::json j;
  j["id"] = spec.id;
  j["converged"] = d.converged;
  j["iterations"] = d.iterations;
  j["damping_M"] = d.damping_M;
  j["contraction_ratio"] = d.contraction_ratio;
  j["residual"] = d.residual;
  j["distances"] = d.distances;
  j["step_ratios"] = d.step_ratios;
  j["m_search"] = nlohmann::json::array();
  for (const auto& [m, ratio] : d.m_search) j["m_search"].push_back({m, ratio});
  std::ofstream(out / (spec.id + "_diagnostics.json")) << j.dump(2) << '\n';

  std::cout << "M = " << d.damping_M << " (D ratio " << d.contraction_ratio << "), "
            << d.iterations << " iterations, residual " << d.residual
            << (d.converged ? "" : "  NOT CONVERGED") << '\n'
            << "wrote " << out.string() << '\n';
  return d.converged ? kPass : kFail;
}

// Combined summary of every <id>.json report found in dir.
int run_report(const fs::path& dir, bool plot) {
  if (!fs::is_directory(dir)) throw ConfigError("report: no such directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().stem() != "summary" &&
        fs::exists(fs::path(e.path()).replace_extension(".csv")))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("report: no reports in " + dir.string());

  nlohmann::json summary;
  summary["reports"] = nlohmann::json::array();
  bool all = true;
  for (const auto& f : files) {
    std::ifstream in(f);
    const nlohmann::json j = nlohmann::json::parse(in);
    const bool pass = j.at("pass").get<bool>();
    all = all && pass;
    summary["reports"].push_back({{"id", j.at("id")}, {"pass", pass}});
    std::cout << (pass ? "PASS  " : "FAIL  ") << j.at("id").get<std::string>() << '\n';
    if (plot) {
      // gnuplot script; one curve per quantity in log-log axes
      const fs::path csv = fs::path(f).replace_extension(".csv");
      std::ofstream gp(fs::path(f).replace_extension(".gp"));
      gp << "set datafile separator ','\nset logscale xy\nset key outside\n"
         << "set terminal svg size 900,600\nset output '" << f.stem().string() << ".svg'\n"
         << "plot for [q in system(\"tail -n +2 " << csv.filename().string()
         << " | cut -d, -f1 | uniq\")] '" << csv.filename().string()
         << "' using 2:(strcol(1) eq q ? $3 : 1/0) with linespoints title q\n";
    }
  }
  summary["pass"] = all;
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  return all ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynheat: half-space heat equation with a dynamical boundary condition"};
  app.require_subcommand(1);

  auto* kernels = app.add_subcommand("kernels", "kernel identities");
  kernels->require_subcommand(1);
  auto* kernels_check = kernels->add_subcommand("check", "run the kernel invariant checks");

  auto* quad = app.add_subcommand("quad", "quadrature checks");
  quad->require_subcommand(1);
  auto* quad_check = quad->add_subcommand("check", "S2 shift/semigroup laws and the moment bound");

  fs::path out_dir;
  std::string config_path;
  auto* solve = app.add_subcommand("solve", "run the Picard solver and dump v, w, u");
  solve->add_option("config", config_path, "experiment file")->required()->check(CLI::ExistingFile);
  solve->add_option("-o,--out", out_dir, "output directory (default: from the config)");

  auto* verify = app.add_subcommand("verify", "estimate checks");
  verify->require_subcommand(1);
  auto* verify_estimates = verify->add_subcommand("estimates", "smoothing rates and solution bounds");
  verify_estimates->add_option("config", config_path, "experiment file")
      ->required()
      ->check(CLI::ExistingFile);
  verify_estimates->add_option("-o,--out", out_dir, "output directory");
  double a = 0, b = 0, gamma = 0, T = 0, delta = 0, cap = 1048576.0;
  auto* verify_l22 = verify->add_subcommand("lemma22", "smallest M damping the singular integral below delta");
  verify_l22->add_option("a", a)->required();
  verify_l22->add_option("b", b)->required();
  verify_l22->add_option("gamma", gamma)->required();
  verify_l22->add_option("T", T)->required();
  verify_l22->add_option("delta", delta)->required();
  verify_l22->add_option("--cap", cap, "largest M tried");

  auto* oracle = app.add_subcommand("oracle", "finite-difference cross-check");
  oracle->require_subcommand(1);
  auto* oracle_compare = oracle->add_subcommand("compare", "kernel solver against the FD oracle");
  oracle_compare->add_option("config", config_path, "experiment file")
      ->required()
      ->check(CLI::ExistingFile);
  oracle_compare->add_option("-o,--out", out_dir, "output directory");

  fs::path report_dir = "dynheat-out";
  bool plot = false;
  auto* report = app.add_subcommand("report", "aggregate written reports");
  report->add_option("--dir", report_dir, "directory holding <id>.json/<id>.csv");
  report->add_flag("--plot", plot, "also write gnuplot scripts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    auto load = [&] {
      ExperimentSpec spec = load_experiment(config_path);
      if (out_dir.empty()) out_dir = spec.output_dir;
      return spec;
    };
    if (kernels_check->parsed()) {
      const Report rep = kernel_invariants();
      print_checks(rep);
      return rep.pass() ? kPass : kFail;
    }
    if (quad_check->parsed()) {
      Report rep = semigroup_invariants();
      rep.merge(moment_report());
      print_checks(rep);
      return rep.pass() ? kPass : kFail;
    }
    if (solve->parsed()) {
      const ExperimentSpec spec = load();
      return run_solve(spec, out_dir);
    }
    if (verify_estimates->parsed()) {
      const ExperimentSpec spec = load();
      Report rep = smoothing_report();
      rep.id = spec.id + "_estimates";
      rep.merge(verify_theorem11(spec).report);
      return finish(rep, out_dir);
    }
    if (verify_l22->parsed()) {
      try {
        const Lemma22Result r = check_lemma22(a, b, gamma, T, delta, cap);
        std::cout << "M = " << r.M << " (sup " << r.sup << ")\n";
        return kPass;
      } catch (const SolverFailure& e) {
        std::cout << "FAIL  " << e.what() << '\n';
        return kFail;
      }
    }
    if (oracle_compare->parsed()) {
      const ExperimentSpec spec = load();
      const OracleReport rep = compare_with_oracle(spec);
      for (const auto& level : rep.levels) {
        std::cout << "h = " << level.h << ", FD dx = " << level.dx << ":";
        for (std::size_t k = 0; k < level.times.size(); ++k)
          std::cout << "  t=" << level.times[k] << " gap " << level.max_gap[k];
        std::cout << '\n';
      }
      return finish(rep.report, out_dir);
    }
    if (report->parsed()) return run_report(report_dir, plot);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
