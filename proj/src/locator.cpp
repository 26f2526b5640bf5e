#include "measfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace measfem
{

namespace detail
{
std::optional<Location> accept_location(const SimplicialMesh &mesh, Index cell, const Point &x);
}

namespace
{

Point sub(const Point &a, const Point &b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Point &a, const Point &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Point closest_on_segment(const Point &p, const Point &a, const Point &b)
{
  const Point ab = sub(b, a);
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(sub(p, a), ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]};
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Point closest_on_triangle(const Point &p, const Point &a, const Point &b, const Point &c)
{
  const Point ab = sub(b, a), ac = sub(c, a), ap = sub(p, a);
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0)
    return a;
  const Point bp = sub(p, b);
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3)
    return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0)
  {
    const double v = d1 / (d1 - d3);
    return {a[0] + v * ab[0], a[1] + v * ab[1], a[2] + v * ab[2]};
  }
  const Point cp = sub(p, c);
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6)
    return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0)
  {
    const double w = d2 / (d2 - d6);
    return {a[0] + w * ac[0], a[1] + w * ac[1], a[2] + w * ac[2]};
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
  {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b[0] + w * (c[0] - b[0]), b[1] + w * (c[1] - b[1]), b[2] + w * (c[2] - b[2])};
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {a[0] + ab[0] * v + ac[0] * w, a[1] + ab[1] * v + ac[1] * w, a[2] + ab[2] * v + ac[2] * w};
}

} // namespace

PointLocator::PointLocator(const SimplicialMesh &mesh) : mesh_(&mesh)
{
  const double pad = 1e-9;
  std::vector<std::array<Point, 2>> boxes;
  boxes.reserve(mesh.cells.size());
  for (const Cell &c : mesh.cells)
  {
    Point lo = mesh.vertices[c[0]], hi = lo;
    for (int i = 1; i <= mesh.dim; ++i)
      for (int k = 0; k < 3; ++k)
      {
        lo[k] = std::min(lo[k], mesh.vertices[c[i]][k]);
        hi[k] = std::max(hi[k], mesh.vertices[c[i]][k]);
      }
    for (int k = 0; k < 3; ++k)
    {
      lo[k] -= pad;
      hi[k] += pad;
    }
    boxes.push_back({lo, hi});
  }
  build_grid(cells_, boxes, mesh.cells.size());

  boxes.clear();
  for (const Facet &f : mesh.boundary_facets)
  {
    Point lo = mesh.vertices[f[0]], hi = lo;
    for (int i = 1; i < mesh.dim; ++i)
      for (int k = 0; k < 3; ++k)
      {
        lo[k] = std::min(lo[k], mesh.vertices[f[i]][k]);
        hi[k] = std::max(hi[k], mesh.vertices[f[i]][k]);
      }
    boxes.push_back({lo, hi});
  }
  build_grid(facets_, boxes, mesh.boundary_facets.size());
}

void PointLocator::build_grid(Grid &grid, const std::vector<std::array<Point, 2>> &boxes, std::size_t target) const
{
  const int dim = mesh_->dim;
  grid.lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(), 0.0};
  grid.hi = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(), 0.0};
  if (dim == 3)
  {
    grid.lo[2] = std::numeric_limits<double>::max();
    grid.hi[2] = std::numeric_limits<double>::lowest();
  }
  for (const auto &b : boxes)
    for (int k = 0; k < dim; ++k)
    {
      grid.lo[k] = std::min(grid.lo[k], b[0][k]);
      grid.hi[k] = std::max(grid.hi[k], b[1][k]);
    }
  if (boxes.empty())
  {
    grid.offsets.assign(2, 0);
    return;
  }

  double measure = 1.0;
  for (int k = 0; k < dim; ++k)
    measure *= std::max(grid.hi[k] - grid.lo[k], 1e-12);
  const double side = std::pow(measure / static_cast<double>(std::max<std::size_t>(target, 1)), 1.0 / dim);
  for (int k = 0; k < 3; ++k)
  {
    if (k < dim)
      grid.n[k] = std::clamp(static_cast<int>(std::ceil((grid.hi[k] - grid.lo[k]) / side)), 1, 1024);
    else
      grid.n[k] = 1;
    const double width = std::max(grid.hi[k] - grid.lo[k], 1e-300);
    grid.inv_width[k] = grid.n[k] / width;
  }

  const std::size_t n_buckets = static_cast<std::size_t>(grid.n[0]) * grid.n[1] * grid.n[2];
  std::vector<Index> count(n_buckets + 1, 0);
  auto for_each_bucket = [&](const std::array<Point, 2> &box, auto &&fn) {
    const auto a = bucket_of(grid, box[0]);
    const auto b = bucket_of(grid, box[1]);
    for (int k = a[2]; k <= b[2]; ++k)
      for (int j = a[1]; j <= b[1]; ++j)
        for (int i = a[0]; i <= b[0]; ++i)
          fn((static_cast<std::size_t>(k) * grid.n[1] + j) * grid.n[0] + i);
  };
  for (const auto &box : boxes)
    for_each_bucket(box, [&](std::size_t bucket) { ++count[bucket + 1]; });
  for (std::size_t i = 0; i < n_buckets; ++i)
    count[i + 1] += count[i];
  grid.offsets = count;
  grid.items.resize(count.back());
  std::vector<Index> fill(count.begin(), count.end() - 1);
  for (std::size_t item = 0; item < boxes.size(); ++item)
    for_each_bucket(boxes[item], [&](std::size_t bucket) { grid.items[fill[bucket]++] = static_cast<Index>(item); });
}

std::array<int, 3> PointLocator::bucket_of(const Grid &grid, const Point &x) const
{
  std::array<int, 3> b{0, 0, 0};
  for (int k = 0; k < mesh_->dim; ++k)
    b[k] = std::clamp(static_cast<int>(std::floor((x[k] - grid.lo[k]) * grid.inv_width[k])), 0, grid.n[k] - 1);
  return b;
}

std::optional<Location> PointLocator::locate(const Point &x) const
{
  for (int k = 0; k < mesh_->dim; ++k)
    if (!(x[k] >= cells_.lo[k] && x[k] <= cells_.hi[k]))
      return std::nullopt;
  const auto b = bucket_of(cells_, x);
  const std::size_t bucket = (static_cast<std::size_t>(b[2]) * cells_.n[1] + b[1]) * cells_.n[0] + b[0];
  // Items are stored in increasing cell order, so the first hit is the
  // lowest-index containing cell.
  for (Index i = cells_.offsets[bucket]; i < cells_.offsets[bucket + 1]; ++i)
    if (auto loc = detail::accept_location(*mesh_, cells_.items[i], x))
      return loc;
  return std::nullopt;
}

double PointLocator::distance_to_boundary_upto(const Point &x, double eps) const
{
  double best = std::numeric_limits<double>::infinity();
  if (facets_.items.empty())
    return best;
  Point lo = x, hi = x;
  for (int k = 0; k < mesh_->dim; ++k)
  {
    lo[k] -= eps;
    hi[k] += eps;
    if (hi[k] < facets_.lo[k] || lo[k] > facets_.hi[k])
      return best;
  }
  const auto a = bucket_of(facets_, lo);
  const auto b = bucket_of(facets_, hi);
  for (int k = a[2]; k <= b[2]; ++k)
    for (int j = a[1]; j <= b[1]; ++j)
      for (int i = a[0]; i <= b[0]; ++i)
      {
        const std::size_t bucket = (static_cast<std::size_t>(k) * facets_.n[1] + j) * facets_.n[0] + i;
        for (Index it = facets_.offsets[bucket]; it < facets_.offsets[bucket + 1]; ++it)
        {
          const Facet &f = mesh_->boundary_facets[facets_.items[it]];
          const auto &v = mesh_->vertices;
          const Point q = mesh_->dim == 2 ? closest_on_segment(x, v[f[0]], v[f[1]])
                                          : closest_on_triangle(x, v[f[0]], v[f[1]], v[f[2]]);
          const Point d = sub(x, q);
          best = std::min(best, std::sqrt(dot(d, d)));
        }
      }
  return best;
}

bool PointLocator::near_boundary(const Point &x, double eps) const
{
  return distance_to_boundary_upto(x, eps) < eps;
}

} // namespace measfem
