#pragma once

#include "measfem/config.hpp"
#include "measfem/fespace.hpp"
#include "measfem/scheme.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace measfem
{

class AnalysisError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Solver failure inside a study, tagged with the failing level.
class StudyError : public SolverError
{
public:
  StudyError(int level, const std::string &what)
      : SolverError("level " + std::to_string(level) + ": " + what), level_(level)
  {
  }
  int level() const { return level_; }

private:
  int level_;
};

/**
 * Nested meshes meshes[l + 1] = refine_uniform(meshes[l]) with lazily built
 * Lagrange spaces. Safe to query from several threads.
 */
class RefinementLadder
{
public:
  RefinementLadder(SimplicialMesh initial, int top_level);

  int top_level() const { return static_cast<int>(meshes_.size()) - 1; }
  const std::shared_ptr<const SimplicialMesh> &mesh(int level) const { return meshes_.at(level); }
  std::shared_ptr<const FESpace> space(int level, int degree) const;

  /// Level of the mesh a space lives on; throws if not on this ladder.
  int level_of(const FESpace &V) const;

  /// For every cell on `fine_level`, its ancestor cell on `coarse_level`.
  std::vector<Index> ancestors(int fine_level, int coarse_level) const;

private:
  std::vector<std::shared_ptr<const SimplicialMesh>> meshes_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const FESpace>> spaces_;
  mutable std::mutex mutex_;
};

/// Exact prolongation of a coarse FE function to `target_level` (same degree).
FEFunction prolong(const FEFunction &coarse, const RefinementLadder &ladder, int target_level);

/**
 * ||u_l - u_ref|| on the cells of u_ref's mesh selected by `region`. u_l is
 * prolonged to the reference level first; degrees may differ.
 */
double error_norm(const FEFunction &u_l, const FEFunction &u_ref, const RefinementLadder &ladder,
                  const RegionPredicate &region, Norm norm);

/// Error against an analytic function on u's own mesh (quadrature degree 6).
double error_norm_exact(const FEFunction &u, const std::function<double(const Point &)> &exact,
                        const std::function<Point(const Point &)> &exact_gradient, const RegionPredicate &region,
                        Norm norm);

/// ||u|| over the selected cells of u's own mesh.
double function_norm(const FEFunction &u, const RegionPredicate &region, Norm norm);

/// r_l = log2(e_{l-1} / e_l); nullopt for l = 0 or nonpositive errors.
std::vector<std::optional<double>> compute_rates(const std::vector<double> &errors);

struct ErrorColumn
{
  Norm norm = Norm::L2;
  std::string region;
  std::vector<double> errors;
  std::vector<std::optional<double>> rates;
};

struct ConvergenceReport
{
  std::string name;
  std::string domain;
  int degree = 1;
  SchemeTag scheme = SchemeTag::standard;
  ErrorReference reference = ErrorReference::discrete;
  int reference_level = 0;
  int reference_degree = 1;

  std::vector<int> levels;
  std::vector<double> h;
  std::vector<Index> n_dofs;
  std::vector<ErrorColumn> columns;

  const ErrorColumn &column(Norm norm, const std::string &region) const;

  std::string to_csv() const;
  std::string to_markdown() const;
};

/// Builds the ladder, solves reference and study levels, tabulates errors.
/// Returns one report per scheme (two when config.scheme == both).
std::vector<ConvergenceReport> run_study(const ExperimentConfig &config);

/// Single solve of the configured problem on one ladder level.
DiscreteSolution solve_level(const ExperimentConfig &config, const RefinementLadder &ladder, int level, int degree,
                             SchemeTag scheme, const MeasureData *mu);

} // namespace measfem
