// measfem command-line front end.
#include "measfem/analysis.hpp"
#include "measfem/config.hpp"
#include "measfem/scheme.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace measfem;

namespace
{

std::string stage = "startup";

void parse_levels(const std::string &text, ExperimentConfig &config)
{
  const auto dots = text.find("..");
  try
  {
    if (dots == std::string::npos)
      throw std::invalid_argument("missing '..'");
    std::size_t used = 0;
    const int a = std::stoi(text.substr(0, dots), &used);
    if (used != dots)
      throw std::invalid_argument("bad lower bound");
    const std::string rest = text.substr(dots + 2);
    const int b = std::stoi(rest, &used);
    if (used != rest.size())
      throw std::invalid_argument("bad upper bound");
    config.level_min = a;
    config.level_max = b;
  }
  catch (const std::exception &)
  {
    throw ConfigError("levels", "expected A..B, got '" + text + "'");
  }
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run_config(ExperimentConfig config, const std::string &out_dir)
{
  stage = "config";
  if (!out_dir.empty())
    config.output_dir = out_dir;
  config.threads = thread_count_from_env(config.threads);
  validate(config);

  stage = "study";
  const auto reports = run_study(config);

  stage = "report";
  std::filesystem::create_directories(config.output_dir);
  for (const ConvergenceReport &r : reports)
  {
    const std::string stem =
        (config.name.empty() ? r.domain : config.name) + "_k" + std::to_string(r.degree) + "_" + to_string(r.scheme);
    write_text(std::filesystem::path(config.output_dir) / (stem + ".csv"), r.to_csv());
    write_text(std::filesystem::path(config.output_dir) / (stem + ".md"), r.to_markdown());
    std::cout << r.to_markdown() << '\n';
    std::cerr << "wrote " << (std::filesystem::path(config.output_dir) / (stem + ".csv")).string() << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Finite element solver for Poisson problems with measure data"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out, export_path, levels;
  int degree = 0, refine = 0, level = 0, threads = 0;

  auto *run = app.add_subcommand("run", "run a convergence study");
  auto *run_src = run->add_option_group("source");
  run_src->add_option("--preset", preset_name, "example1 | example2 | example3 | calibration");
  run_src->add_option("--config", config_path, "JSON experiment configuration");
  run_src->require_option(1);
  run->add_option("--degree", degree, "polynomial degree (1-3)");
  run->add_option("--levels", levels, "study levels A..B");
  run->add_option("--out", out, "output directory");
  run->add_option("--threads", threads, "level-parallel worker threads");

  auto *mesh = app.add_subcommand("mesh", "write a refined preset mesh");
  mesh->add_option("--preset", preset_name)->required();
  mesh->add_option("--refine", refine)->required()->check(CLI::NonNegativeNumber);
  mesh->add_option("--out", out)->required();

  auto *solve = app.add_subcommand("solve", "solve on one level and export the solution");
  solve->add_option("--config", config_path)->required();
  solve->add_option("--level", level)->required()->check(CLI::NonNegativeNumber);
  solve->add_option("--export", export_path)->required();

  auto *equiv = app.add_subcommand("check-equivalence", "compare the standard and very weak schemes");
  equiv->add_option("--preset", preset_name)->required();
  equiv->add_option("--degree", degree)->required();
  equiv->add_option("--level", level)->required()->check(CLI::NonNegativeNumber);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try
  {
    if (*run)
    {
      stage = "config";
      ExperimentConfig config = preset_name.empty() ? load_config(config_path) : preset(preset_name);
      if (degree != 0)
      {
        if (degree < 1 || degree > 3)
          throw ConfigError("degree", "must be 1, 2 or 3");
        set_degree(config, degree);
      }
      if (!levels.empty())
        parse_levels(levels, config);
      if (threads > 0)
        config.threads = threads;
      return run_config(std::move(config), out);
    }

    if (*mesh)
    {
      stage = "config";
      const ExperimentConfig config = preset(preset_name);
      stage = "mesh";
      SimplicialMesh m = build_initial_mesh(config.domain);
      for (int l = 0; l < refine; ++l)
        m = refine_uniform(m);
      std::ofstream f(out);
      if (!f)
        throw std::runtime_error("cannot write " + out);
      write_mesh(m, f);
      std::cerr << "mesh: " << m.n_vertices() << " vertices, " << m.n_cells() << " cells, h = " << mesh_size(m)
                << '\n';
      return 0;
    }

    if (*solve)
    {
      stage = "config";
      const ExperimentConfig config = load_config(config_path);
      stage = "mesh";
      const RefinementLadder ladder(build_initial_mesh(config.domain), level);
      std::optional<MeasureData> mu;
      if (config.measure)
        mu = build_measure(*config.measure);
      stage = "solve";
      const SchemeTag scheme = config.scheme == SchemeChoice::berggren ? SchemeTag::berggren : SchemeTag::standard;
      const DiscreteSolution sol = solve_level(config, ladder, level, config.degree, scheme, mu ? &*mu : nullptr);

      stage = "export";
      std::ofstream f(export_path), fm(export_path + ".mesh"), meta(export_path + ".meta");
      if (!f || !fm || !meta)
        throw std::runtime_error("cannot write " + export_path);
      write_function(sol.u, f);
      write_mesh(sol.u.space->mesh(), fm);
      meta << "scheme " << to_string(sol.scheme) << " tol " << sol.tol << " iterations " << sol.stats.iterations;
      if (sol.mass_stats)
        meta << " mass_iterations " << sol.mass_stats->iterations;
      meta << '\n';
      std::cerr << "solve: " << sol.u.space->n_dofs() << " dofs, " << sol.stats.iterations << " CG iterations\n";
      return 0;
    }

    if (*equiv)
    {
      stage = "config";
      ExperimentConfig config = preset(preset_name);
      if (degree < 1 || degree > 3)
        throw ConfigError("degree", "must be 1, 2 or 3");
      set_degree(config, degree);
      if (!config.measure)
        throw ConfigError("preset", "check-equivalence needs a measure-data preset");
      stage = "mesh";
      const RefinementLadder ladder(build_initial_mesh(config.domain), level);
      const MeasureData mu = build_measure(*config.measure);
      stage = "solve";
      const auto a = solve_level(config, ladder, level, degree, SchemeTag::standard, &mu);
      const auto b = solve_level(config, ladder, level, degree, SchemeTag::berggren, &mu);
      std::printf("%.6e\n", relative_max_discrepancy(a.u.coefficients, b.u.coefficients));
      return 0;
    }
  }
  catch (const ConfigError &e)
  {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return 2;
  }
  catch (const SolverError &e)
  {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return 3;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
