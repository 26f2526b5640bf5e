#include "measfem/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace measfem
{

namespace
{

double f1(double t) { return 0.5 + 0.1 * (1.0 - t) * std::sin(4.0 * M_PI * t); }
double f2(double t) { return 0.5 + 0.1 * (1.0 - t) * std::cos(4.0 * M_PI * t); }
double f3(double t) { return 0.3 + t; }

} // namespace

double polyline_length(const std::vector<CurveSample> &polyline)
{
  double len = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i)
  {
    const Point &a = polyline[i - 1].x, &b = polyline[i].x;
    len += std::sqrt((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]) + (b[2] - a[2]) * (b[2] - a[2]));
  }
  return len;
}

double MeasureData::total_variation() const
{
  double tv = 0.0;
  for (const PointAtom &a : points)
    tv += std::abs(a.weight);
  for (const CurveAtom &c : curves)
    tv += std::abs(c.weight) * polyline_length(c.polyline);
  return tv;
}

double MeasureData::total_mass() const
{
  double m = 0.0;
  for (const PointAtom &a : points)
    m += a.weight;
  for (const CurveAtom &c : curves)
    m += c.weight * polyline_length(c.polyline);
  return m;
}

MeasureData MeasureData::scaled(double factor) const
{
  MeasureData out = *this;
  for (PointAtom &a : out.points)
    a.weight *= factor;
  for (CurveAtom &c : out.curves)
    c.weight *= factor;
  return out;
}

std::vector<CurveSample> sample_curve(const Parametrization &s, double t0, double t1, int segments)
{
  if (segments < 1 || !(t1 > t0))
    throw std::invalid_argument("sample_curve: need t1 > t0 and at least one segment");
  std::vector<CurveSample> out;
  out.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i)
  {
    const double t = i == segments ? t1 : t0 + (t1 - t0) * i / segments;
    out.push_back({t, s(t)});
  }
  return out;
}

std::vector<CurveSample> sample_curve_adaptive(const Parametrization &s, double t0, double t1, int initial_segments,
                                               double rel_tol, int max_segments)
{
  std::vector<CurveSample> current = sample_curve(s, t0, t1, initial_segments);
  double len = polyline_length(current);
  for (int n = 2 * initial_segments; n <= max_segments; n *= 2)
  {
    std::vector<CurveSample> next = sample_curve(s, t0, t1, n);
    const double next_len = polyline_length(next);
    const bool stable = std::abs(next_len - len) <= rel_tol * next_len;
    current = std::move(next);
    len = next_len;
    if (stable)
      break;
  }
  return current;
}

Parametrization curve_preset(const std::string &name)
{
  if (name == "cube_s1")
    return [](double t) { return Point{f1(t), f2(t), f3(t)}; };
  if (name == "cube_s2")
    return [](double t) { return Point{f2(t), f3(t), f1(t)}; };
  if (name == "cube_s3")
    return [](double t) { return Point{f3(t), f1(t), f2(t)}; };
  throw std::invalid_argument("unknown curve preset '" + name + "'");
}

bool is_curve_preset(const std::string &name)
{
  return name == "cube_s1" || name == "cube_s2" || name == "cube_s3";
}

void check_well_formed(const MeasureData &mu)
{
  for (std::size_t i = 0; i < mu.points.size(); ++i)
    if (!std::isfinite(mu.points[i].weight))
      throw std::invalid_argument("point atom " + std::to_string(i) + ": non-finite weight");
  for (std::size_t i = 0; i < mu.curves.size(); ++i)
  {
    const CurveAtom &c = mu.curves[i];
    const std::string label = "curve atom " + std::to_string(i) + (c.name.empty() ? "" : " (" + c.name + ")");
    if (c.polyline.size() < 2)
      throw std::invalid_argument(label + ": needs at least two samples");
    for (std::size_t j = 1; j < c.polyline.size(); ++j)
      if (!(c.polyline[j].t > c.polyline[j - 1].t))
        throw std::invalid_argument(label + ": parameters must be strictly increasing");
    if (!std::isfinite(c.weight))
      throw std::invalid_argument(label + ": non-finite weight");
  }
}

} // namespace measfem
