// SPDX-License-Identifier: Apache-2.0
// gpj: run, validate and inspect Gross-Pitaevskii eigenvalue computations.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gpj/gpj.hpp"

namespace fs = std::filesystem;

namespace
{

enum Exit
{
  kOk = 0,
  kError = 1,
  kMaxIter = 2
};

gpj::RunConfig resolve_config(const std::string &path, const std::string &preset)
{
  if (!path.empty() && !preset.empty())
    throw gpj::ConfigError("give either a config file or --preset, not both");
  if (!preset.empty())
    return gpj::preset(preset);
  if (path.empty())
    throw gpj::ConfigError("a config file or --preset is required");
  return gpj::load_config(path);
}

std::string resolve_output_dir(const gpj::RunConfig &cfg, const std::string &flag)
{
  if (!flag.empty())
    return flag;
  if (const char *env = std::getenv("GPJ_OUTPUT_DIR"); env && *env)
    return env;
  return cfg.output_dir;
}

void write_json(const gpj::json &j, const fs::path &path)
{
  std::ofstream out(path);
  if (!out)
    throw gpj::Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

gpj::json summary_json(const gpj::RunConfig &cfg, const gpj::RunHistory &h, double wall,
                       const std::string &status)
{
  const auto &s = h.last();
  return {{"name", cfg.name},
          {"status", status},
          {"converged", h.converged},
          {"lambda", s.lambda},
          {"energy", s.energy},
          {"residual", s.residual},
          {"iterations", s.n},
          {"wall_time", wall},
          {"energy_increases", h.energy_increases},
          {"shift_retries", h.shift_retries}};
}

int cmd_run(const std::string &path, const std::string &preset, const std::string &out_flag,
            bool quiet)
{
  const auto cfg = resolve_config(path, preset);
  const fs::path dir = resolve_output_dir(cfg, out_flag);
  fs::create_directories(dir);

  const auto t0 = std::chrono::steady_clock::now();
  const gpj::Problem P = gpj::make_problem(cfg);
  const auto u0 = gpj::initial_field(cfg, P);
  if (cfg.dump_fields)
  {
    gpj::write_field_csv(u0, (dir / "initial.csv").string());
    gpj::write_potential_csv(P.params().W, *P.mesh(), (dir / "potential.csv").string(),
                             gpj::PotentialLayout::Nodal);
  }
  auto observer = [&](const gpj::IterationState &s) {
    if (quiet)
      return;
    std::printf("%5d %-7s residual %.3e  E %.10f  lambda %.10f  tau %.4f\n", s.n,
                gpj::to_string(s.phase), s.residual, s.energy, s.lambda, s.tau);
    std::fflush(stdout);
  };
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  try
  {
    const auto h = gpj::run(P, cfg.strategy, u0, observer);
    gpj::write_history_csv(h, (dir / "history.csv").string());
    gpj::write_field_csv(h.final_u, (dir / "field.csv").string());
    const std::string status = h.converged ? "converged" : "max_iter";
    write_json(summary_json(cfg, h, wall(), status), dir / "summary.json");
    for (const auto &line : h.log)
      std::fprintf(stderr, "note: %s\n", line.c_str());
    std::printf("%s after %d iterations: lambda %.10f  E %.10f  residual %.3e  (%s)\n",
                status.c_str(), h.last().n, h.last().lambda, h.last().energy, h.last().residual,
                dir.string().c_str());
    return h.converged ? kOk : kMaxIter;
  }
  catch (const gpj::RunAborted &e)
  {
    gpj::write_history_csv(e.history, (dir / "history.csv").string());
    if (e.history.final_u.mesh)
      gpj::write_field_csv(e.history.final_u, (dir / "field.csv").string());
    if (!e.history.steps.empty())
      write_json(summary_json(cfg, e.history, wall(), "aborted"), dir / "summary.json");
    throw;
  }
}

int cmd_validate(int n_cells, bool flip, bool no_rate)
{
  gpj::ValidateOptions opt;
  opt.n_cells = n_cells;
  opt.flip_rotation_sign = flip;
  opt.rate = !no_rate;
  const auto results = gpj::run_validation(opt);
  gpj::print_table(results, std::cout);
  const bool ok = gpj::all_passed(results);
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? kOk : kError;
}

int cmd_spectrum(const std::string &path, const std::string &preset, int k,
                 const std::string &out_flag)
{
  const auto cfg = resolve_config(path, preset);
  if (k < 1)
    throw gpj::ConfigError("--k must be positive");
  const gpj::Problem P = gpj::make_problem(cfg);
  const auto unknowns = static_cast<Eigen::Index>(2 * P.n());
  if (unknowns > gpj::kDenseCap)
    throw gpj::DimensionError("spectrum needs 2N <= " + std::to_string(gpj::kDenseCap) +
                              ", this mesh has 2N = " + std::to_string(unknowns));
  if (2 * static_cast<Eigen::Index>(k) > unknowns)
    throw gpj::DimensionError("--k " + std::to_string(k) + " exceeds the " +
                              std::to_string(unknowns / 2) + " available eigenvalues");

  const auto h = gpj::run(P, cfg.strategy, gpj::initial_field(cfg, P));
  if (!h.converged)
    std::fprintf(stderr, "warning: run stopped at residual %.3e before the tolerance\n",
                 h.last().residual);
  // The real form of the complex-linear A(u*) doubles every eigenvalue; keep one per pair.
  const auto eig = gpj::dense_sym_eig(gpj::build_A_op(P, h.final_u, 0.0), P.mass_block(), 2 * k);
  gpj::json values = gpj::json::array();
  for (int i = 0; i < k; ++i)
    values.push_back(eig.values[2 * i]);
  const gpj::json out = {{"name", cfg.name},
                         {"k", k},
                         {"eigenvalues", values},
                         {"lambda_star", h.last().lambda},
                         {"residual", h.last().residual},
                         {"max_pair_residual", eig.max_residual}};
  std::cout << out.dump(2) << '\n';
  if (!out_flag.empty())
    write_json(out, out_flag);
  return kOk;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Finite-element J-method solver for the Gross-Pitaevskii eigenvalue problem"};
  app.require_subcommand(1);

  std::string run_cfg, run_preset, run_out;
  bool quiet = false;
  auto *run = app.add_subcommand("run", "Run an eigensolver configuration");
  run->add_option("config", run_cfg, "JSON configuration file");
  run->add_option("--preset", run_preset, "Built-in configuration instead of a file");
  run->add_option("--out", run_out, "Output directory (overrides GPJ_OUTPUT_DIR and output.dir)");
  run->add_flag("-q,--quiet", quiet, "Suppress per-iteration output");

  int val_n = 8;
  bool val_flip = false, val_no_rate = false;
  auto *validate = app.add_subcommand("validate", "Run the oracle validation suite");
  validate->add_option("--n-cells", val_n, "Cells per side of the oracle meshes")
      ->check(CLI::Range(2, 4096));
  validate->add_flag("--flip-rotation-sign", val_flip,
                     "Negate the rotation block after assembly (fault injection)");
  validate->add_flag("--no-rate", val_no_rate, "Skip the convergence-rate experiment");

  std::string sp_cfg, sp_preset, sp_out;
  int sp_k = 0;
  auto *spectrum = app.add_subcommand("spectrum", "Smallest eigenvalues of the frozen pencil");
  spectrum->add_option("config", sp_cfg, "JSON configuration file");
  spectrum->add_option("--preset", sp_preset, "Built-in configuration instead of a file");
  spectrum->add_option("--k", sp_k, "Number of eigenvalues")->required();
  spectrum->add_option("--out", sp_out, "Also write the JSON to this file");

  std::string preset_name;
  auto *preset = app.add_subcommand("preset", "Print a built-in configuration as JSON");
  preset->add_option("name", preset_name, "Preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*run)
      return cmd_run(run_cfg, run_preset, run_out, quiet);
    if (*validate)
      return cmd_validate(val_n, val_flip, val_no_rate);
    if (*spectrum)
      return cmd_spectrum(sp_cfg, sp_preset, sp_k, sp_out);
    if (*preset)
    {
      std::cout << gpj::to_json(gpj::preset(preset_name)).dump(2) << '\n';
      return kOk;
    }
  }
  catch (const std::exception &e)
  {
    std::fprintf(stderr, "gpj: error: %s\n", e.what());
    return kError;
  }
  return kError;
}
