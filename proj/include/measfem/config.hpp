#pragma once

#include "measfem/measure.hpp"
#include "measfem/mesh.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace measfem
{

/// Malformed experiment configuration. `field` is a JSON-pointer-like path.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(const std::string &field, const std::string &message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field)
  {
  }
  const std::string &field() const { return field_; }

private:
  std::string field_;
};

struct DomainSpec
{
  enum class Kind
  {
    lshape,
    hexagon,
    cube,
    unit_square
  };
  Kind kind = Kind::unit_square;
  int param = 2; // n for lshape/cube/unit_square, pre-refinements for hexagon

  int dim() const { return kind == Kind::cube ? 3 : 2; }
};

std::string to_string(DomainSpec::Kind kind);

/// Curve atom given either by a named parametrization or by explicit samples.
struct CurveSpec
{
  std::string preset;               // empty for explicit samples
  double t0 = 0.0, t1 = 0.4;
  int segments = 512;
  bool adaptive = true;             // double segments until the length settles to 1e-10
  std::vector<CurveSample> samples; // explicit polyline when preset is empty
  double weight = 1.0;
};

struct MeasureSpec
{
  std::vector<PointAtom> points;
  std::vector<CurveSpec> curves;
};

/// Smooth load with known solution u = prod sin(pi x_i), f = dim pi^2 u.
struct SmoothSpec
{
  std::string kind = "sine";
};

double smooth_exact(const SmoothSpec &spec, int dim, const Point &x);
Point smooth_exact_gradient(const SmoothSpec &spec, int dim, const Point &x);
double smooth_load(const SmoothSpec &spec, int dim, const Point &x);

struct NamedRegion
{
  std::string name;
  RegionPredicate region;
};

enum class Norm
{
  L2,
  H1seminorm
};

std::string to_string(Norm norm);
Norm norm_from_string(const std::string &name);

enum class SchemeChoice
{
  standard,
  berggren,
  both
};

enum class ErrorReference
{
  discrete, // fine-level solution on the refinement ladder
  exact     // analytic solution (smooth loads only)
};

struct ExperimentConfig
{
  std::string name;
  DomainSpec domain;
  int degree = 1;
  SchemeChoice scheme = SchemeChoice::standard;
  int level_min = 0;
  int level_max = 4;
  int reference_level = 6;
  std::optional<int> reference_degree; // defaults to degree
  ErrorReference reference = ErrorReference::discrete;
  std::optional<MeasureSpec> measure;
  std::optional<SmoothSpec> smooth;
  std::vector<NamedRegion> regions;
  std::vector<Norm> norms{Norm::L2, Norm::H1seminorm};
  double solver_tol = 1e-12;
  std::string output_dir = ".";
  int threads = 1;

  int effective_reference_degree() const { return reference_degree.value_or(degree); }
};

/// Throws ConfigError on violated invariants.
void validate(const ExperimentConfig &config);

/// example1 | example2 | example3 | calibration
ExperimentConfig preset(const std::string &name);
std::vector<std::string> preset_names();

/// Sets the degree, adjusting preset-specific defaults (example3 reference level).
void set_degree(ExperimentConfig &config, int degree);

SimplicialMesh build_initial_mesh(const DomainSpec &domain);
MeasureData build_measure(const MeasureSpec &spec);

nlohmann::json to_json(const ExperimentConfig &config);
ExperimentConfig config_from_json(const nlohmann::json &j);
ExperimentConfig load_config(const std::string &path);

/// Thread count: MEASFEM_THREADS if set and valid, else `fallback`.
int thread_count_from_env(int fallback);

} // namespace measfem
