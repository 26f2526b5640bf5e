#pragma once

#include "measfem/mesh.hpp"

#include <functional>
#include <string>
#include <vector>

namespace measfem
{

struct PointAtom
{
  Point x{};
  double weight = 1.0;
};

struct CurveSample
{
  double t = 0.0;
  Point x{};
};

/// Weighted line measure w * ds on a polyline approximation of a curve.
struct CurveAtom
{
  std::string name;
  std::vector<CurveSample> polyline;
  double weight = 1.0;
};

/// Finite sum of weighted point and curve atoms.
struct MeasureData
{
  std::vector<PointAtom> points;
  std::vector<CurveAtom> curves;

  bool empty() const { return points.empty() && curves.empty(); }

  /// sum |w_i| + sum |w_j| * length_j
  double total_variation() const;
  /// sum w_i + sum w_j * length_j, i.e. <mu, 1>.
  double total_mass() const;

  MeasureData scaled(double factor) const;
};

double polyline_length(const std::vector<CurveSample> &polyline);

using Parametrization = std::function<Point(double)>;

/// Uniform parameter sampling with `segments` segments on [t0, t1].
std::vector<CurveSample> sample_curve(const Parametrization &s, double t0, double t1, int segments);

/**
 * Samples with `initial_segments` segments and doubles the count until the
 * polyline length changes by at most rel_tol (relative) or max_segments is
 * reached.
 */
std::vector<CurveSample> sample_curve_adaptive(const Parametrization &s, double t0, double t1,
                                               int initial_segments = 512, double rel_tol = 1e-10,
                                               int max_segments = 1 << 20);

/// Named analytic curves: "cube_s1", "cube_s2", "cube_s3" (t in [0, 0.4]).
Parametrization curve_preset(const std::string &name);
bool is_curve_preset(const std::string &name);

/// Throws std::invalid_argument naming the first malformed atom.
void check_well_formed(const MeasureData &mu);

} // namespace measfem
