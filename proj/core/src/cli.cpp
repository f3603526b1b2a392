#include "chmhd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "chmhd/error.hpp"
#include "chmhd/manufactured.hpp"
#include "chmhd/parallel.hpp"
#include "chmhd/projections.hpp"
#include "chmhd/scenario.hpp"
#include "chmhd/vtk.hpp"

namespace chmhd {

namespace {

std::string e8(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open output file: " + path);
  f << content;
  f.flush();
  if (!f) throw Error("write failed for: " + path);
}

ScenarioConfig manufactured_config(int n, double dt) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::manufactured;
  cfg.n = n;
  cfg.dt = dt;
  cfg.T = 1.0;
  cfg.params.dt = dt;
  cfg.validate();
  return cfg;
}

} // namespace

void validate_levels(const std::vector<int>& levels) {
  if (levels.empty()) throw ConfigError("levels: at least one mesh level required");
  if (levels.front() < 2) throw ConfigError("levels: the smallest level must be at least 2");
  for (size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && levels[i] <= levels[i - 1])
      throw ConfigError("levels: must be strictly increasing");
    if (levels[i] % levels.front() != 0)
      throw ConfigError("levels: " + std::to_string(levels[i]) +
                        " is not a multiple of the smallest level");
    const int ratio = levels[i] / levels.front();
    if ((ratio & (ratio - 1)) != 0)
      throw ConfigError("levels: " + std::to_string(levels[i]) +
                        " is not a power-of-two multiple of the smallest level");
  }
}

ConvergenceStudy run_convergence_study(const std::vector<int>& levels, double dt_factor,
                                       SolverKind solver) {
  validate_levels(levels);
  if (dt_factor <= 0.0) throw ConfigError("dt rule: the h^2 factor must be positive");

  ConvergenceStudy study;
  for (int n : levels) {
    const double h = 1.0 / n;
    // Snap dt so the run ends exactly at T = 1.
    const long long steps = std::max(1LL, std::llround(1.0 / (dt_factor * h * h)));
    const double dt = 1.0 / static_cast<double>(steps);
    const ScenarioConfig cfg = manufactured_config(n, dt);

    const Spaces spaces = scenario_spaces(cfg);
    const State initial = scenario_initial_state(cfg, spaces);
    const RunHooks hooks = scenario_hooks(cfg, spaces);
    const RunResult res =
        run(spaces, cfg.run_params(), initial, static_cast<int>(steps), hooks, {}, solver);
    if (res.failed) {
      study.failed = true;
      study.failure = "level n=" + std::to_string(n) + " failed at step " +
                      std::to_string(res.failed_step) + ": " + res.failure;
      break;
    }
    ConvergenceLevel lev;
    lev.n = n;
    lev.h = h;
    lev.dt = dt;
    const ExactSolution exact = exact_solution(cfg.T, cfg.run_params());
    lev.errors = terminal_errors(res.final_state.phi, res.final_state.u, res.final_state.B,
                                 res.final_state.p, exact);
    study.levels.push_back(lev);
  }
  return study;
}

std::string convergence_csv(const ConvergenceStudy& study) {
  static const char* const kNames[7] = {"phi_l2", "phi_h1",  "u_l2", "u_h1",
                                        "B_l2",   "B_hcurl", "p_l2"};
  const auto column = [&](const TerminalErrors& e, int i) {
    switch (i) {
      case 0: return e.phi_l2;
      case 1: return e.phi_h1;
      case 2: return e.u_l2;
      case 3: return e.u_h1;
      case 4: return e.B_l2;
      case 5: return e.B_hcurl;
      default: return e.p_l2;
    }
  };
  const bool with_rates = study.levels.size() >= 2;

  std::vector<double> h;
  for (const auto& lev : study.levels) h.push_back(lev.h);
  std::array<std::vector<double>, 7> rates;
  if (with_rates) {
    for (int i = 0; i < 7; ++i) {
      std::vector<double> errs;
      for (const auto& lev : study.levels) errs.push_back(column(lev.errors, i));
      rates[i] = convergence_rates(h, errs);
    }
  }

  std::ostringstream out;
  out << "n,h,dt";
  for (int i = 0; i < 7; ++i) {
    out << "," << kNames[i];
    if (with_rates) out << "," << kNames[i] << "_rate";
  }
  out << "\n";
  for (size_t k = 0; k < study.levels.size(); ++k) {
    const auto& lev = study.levels[k];
    out << lev.n << "," << e8(lev.h) << "," << e8(lev.dt);
    for (int i = 0; i < 7; ++i) {
      out << "," << e8(column(lev.errors, i));
      if (with_rates) out << "," << f4(rates[i][k]);
    }
    out << "\n";
  }
  return out.str();
}

std::vector<ProjectionLevel> run_projection_study(const std::string& target,
                                                  const std::vector<int>& levels) {
  validate_levels(levels);
  if (target != "phi0" && target != "u0" && target != "B0")
    throw ConfigError("unknown projection target '" + target + "' (expected phi0, u0, or B0)");

  std::vector<ProjectionLevel> out;
  for (int n : levels) {
    const ScenarioConfig cfg = manufactured_config(n, 1.0 / (n * n));
    const Spaces spaces = scenario_spaces(cfg);
    const ExactSolution ex = exact_solution(0.0, cfg.run_params());
    ProjectionLevel lev;
    lev.n = n;
    lev.h = 1.0 / n;
    if (target == "phi0") {
      const FEField f = ritz_project(spaces.phase, ex.phi, ex.grad_phi);
      lev.err_a = error_norm(f, ex.phi, ex.grad_phi, NormKind::L2);
      lev.err_b = error_norm(f, ex.phi, ex.grad_phi, NormKind::H1_semi);
    } else if (target == "u0") {
      const FEField f = l2_project(spaces.velocity, ex.u);
      lev.err_a = error_norm(f, ex.u, ex.grad_u, NormKind::L2);
      lev.err_b = error_norm(f, ex.u, ex.grad_u, NormKind::H1_semi);
    } else {
      const FEField f = maxwell_quasi_project(spaces.induction, ex.B, ex.curl_B, ex.u);
      lev.err_a = error_norm_hcurl(f, ex.B, ex.curl_B, NormKind::L2);
      lev.err_b = error_norm_hcurl(f, ex.B, ex.curl_B, NormKind::Hcurl);
    }
    out.push_back(lev);
  }
  return out;
}

std::string projection_csv(const std::string& target,
                           const std::vector<ProjectionLevel>& levels) {
  const char* second = (target == "B0") ? "hcurl" : "h1";
  const bool with_rates = levels.size() >= 2;

  std::vector<double> h, ea, eb;
  for (const auto& lev : levels) {
    h.push_back(lev.h);
    ea.push_back(lev.err_a);
    eb.push_back(lev.err_b);
  }
  std::vector<double> ra, rb;
  if (with_rates) {
    ra = convergence_rates(h, ea);
    rb = convergence_rates(h, eb);
  }

  std::ostringstream out;
  out << "n,h,l2";
  if (with_rates) out << ",l2_rate";
  out << "," << second;
  if (with_rates) out << "," << second << "_rate";
  out << "\n";
  for (size_t k = 0; k < levels.size(); ++k) {
    out << levels[k].n << "," << e8(levels[k].h) << "," << e8(levels[k].err_a);
    if (with_rates) out << "," << f4(ra[k]);
    out << "," << e8(levels[k].err_b);
    if (with_rates) out << "," << f4(rb[k]);
    out << "\n";
  }
  return out.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite element solver for a coupled phase-field MHD system"};
  app.require_subcommand(0, 1);

  std::string config_path, preset, out_path, dt_rule = "h2:1.0", target;
  std::string solver_str = "lu";
  std::vector<int> levels = {8, 16, 32};
  int threads = 1;
  std::uint64_t seed = 1;

  auto* sim = app.add_subcommand("simulate", "Run a scenario and write VTK + CSV output");
  sim->add_option("--config", config_path, "INI run configuration");
  sim->add_option("--scenario-preset", preset,
                  "One of: manufactured, spinodal_snapshots, spinodal_energy, lid_mu2, "
                  "lid_mu06, lid_mu01, kelvin_helmholtz");
  auto* sim_seed = sim->add_option("--seed", seed, "Override the configured random seed");
  sim->add_option("--solver", solver_str, "Linear solver")
      ->check(CLI::IsMember({"lu", "gmres"}));
  sim->add_option("--threads", threads, "Assembly threads")->check(CLI::PositiveNumber);

  auto* conv = app.add_subcommand(
      "convergence", "Manufactured-solution rate study (errors at T=1 per mesh level)");
  conv->add_option("--levels", levels, "Mesh levels, e.g. 8,16,32")->delimiter(',');
  conv->add_option("--dt-rule", dt_rule, "h2:<c> selects dt = c h^2 (snapped onto T=1)");
  conv->add_option("--out", out_path, "CSV output path");
  conv->add_option("--solver", solver_str, "Linear solver")
      ->check(CLI::IsMember({"lu", "gmres"}));
  conv->add_option("--threads", threads, "Assembly threads")->check(CLI::PositiveNumber);
  conv->add_option("--seed", seed, "Seed for the forcing-oracle sample points");

  auto* proj = app.add_subcommand("project", "Projection accuracy study for initial fields");
  proj->add_option("target", target, "phi0, u0, or B0")->required();
  proj->add_option("--levels", levels, "Mesh levels, e.g. 8,16,32")->delimiter(',');
  proj->add_option("--out", out_path, "CSV output path");
  proj->add_option("--threads", threads, "Assembly threads")->check(CLI::PositiveNumber);

  if (args.empty()) {
    err << app.help();
    return 2;
  }

  std::vector<const char*> argv;
  argv.push_back("chmhd");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (app.get_subcommands().empty()) {
    out << app.help();
    return 2;
  }

  try {
    set_thread_count(threads);
    const SolverKind solver = (solver_str == "gmres") ? SolverKind::gmres : SolverKind::lu;

    if (sim->parsed()) {
      if (config_path.empty() == preset.empty()) {
        err << "error: simulate needs exactly one of --config or --scenario-preset\n";
        return 2;
      }
      ScenarioConfig cfg =
          config_path.empty() ? scenario_preset(preset) : load_config(config_path);
      if (sim_seed->count() > 0) cfg.seed = seed;
      cfg.validate();

      const Spaces spaces = scenario_spaces(cfg);
      const State initial = scenario_initial_state(cfg, spaces);
      RunHooks hooks = scenario_hooks(cfg, spaces);

      std::filesystem::create_directories(cfg.output.directory);
      const Mesh& mesh = *spaces.mesh;
      const int n_steps = cfg.n_steps();
      const std::string dir = cfg.output.directory;
      if (cfg.output.every > 0) {
        hooks.on_step = [&cfg, &mesh, n_steps, dir](const State& s, const DiagnosticsRow&) {
          if (s.step % cfg.output.every == 0 || s.step == n_steps) {
            char name[40];
            std::snprintf(name, sizeof name, "fields_%06d.vtk", s.step);
            write_vtk(sample_snapshot(s), mesh, dir + "/" + name);
          }
        };
      }

      const RunResult res = run(spaces, cfg.run_params(), initial, n_steps, hooks, {}, solver);
      write_timeseries(res.trace, dir + "/timeseries.csv");
      if (res.failed) {
        err << "error: step " << res.failed_step << " failed: " << res.failure << "\n";
        err << "partial time series written to " << dir << "/timeseries.csv\n";
        return 1;
      }
      const DiagnosticsRow& last = res.trace.back();
      out << "scenario " << to_string(cfg.kind) << ": " << n_steps << " steps to t = " << last.t
          << "\n";
      out << "final mass " << last.mass << ", algorithm energy " << last.algorithm_energy
          << "\n";
      out << "output in " << dir << "\n";
      return 0;
    }

    if (conv->parsed()) {
      double dt_factor = 0.0;
      if (dt_rule.rfind("h2:", 0) == 0) {
        try {
          size_t used = 0;
          dt_factor = std::stod(dt_rule.substr(3), &used);
          if (used != dt_rule.size() - 3) dt_factor = 0.0;
        } catch (const std::exception&) {
          dt_factor = 0.0;
        }
      }
      if (dt_factor <= 0.0) {
        err << "error: --dt-rule must look like h2:<positive factor>\n";
        return 2;
      }
      validate_levels(levels);

      // The closed-form forcing must agree with the PDE before any rate can
      // be trusted; this gate is cheap and runs every time.
      const Params unit;
      const ForcingAudit audit = validate_forcing(unit, 50, 1e-6, seed);
      if (!audit.passed) {
        err << "error: forcing oracle gate failed (worst deviation " << audit.worst << ")\n";
        return 1;
      }

      const ConvergenceStudy study = run_convergence_study(levels, dt_factor, solver);
      const std::string csv = convergence_csv(study);
      out << csv;
      if (!out_path.empty()) write_text(out_path, csv);
      if (study.failed) {
        err << "error: " << study.failure << "\n";
        if (!out_path.empty()) err << "partial table written to " << out_path << "\n";
        return 1;
      }
      return 0;
    }

    // project
    const auto levels_out = run_projection_study(target, levels);
    const std::string csv = projection_csv(target, levels_out);
    out << csv;
    if (!out_path.empty()) write_text(out_path, csv);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace chmhd
