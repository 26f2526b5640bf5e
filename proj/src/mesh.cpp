#include "measfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

namespace measfem
{

namespace
{

Point sub(const Point &a, const Point &b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double dist2(const Point &a, const Point &b)
{
  const Point d = sub(a, b);
  return d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
}

Point midpoint(const Point &a, const Point &b)
{
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

std::uint64_t edge_key(Index a, Index b)
{
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

constexpr std::array<std::array<int, 2>, 3> tri_edges{{{0, 1}, {1, 2}, {0, 2}}};
constexpr std::array<std::array<int, 2>, 6> tet_edges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

Facet sorted_facet(const Cell &c, int dim, int omit)
{
  Facet f{-1, -1, -1};
  int j = 0;
  for (int i = 0; i <= dim; ++i)
    if (i != omit)
      f[j++] = c[i];
  std::sort(f.begin(), f.begin() + dim);
  return f;
}

/// Sorted list of unique edges, as keys.
std::vector<std::uint64_t> edge_list(const SimplicialMesh &mesh)
{
  std::vector<std::uint64_t> keys;
  const std::size_t per_cell = mesh.dim == 2 ? 3 : 6;
  keys.reserve(mesh.cells.size() * per_cell);
  for (const Cell &c : mesh.cells)
  {
    if (mesh.dim == 2)
      for (auto [i, j] : tri_edges)
        keys.push_back(edge_key(c[i], c[j]));
    else
      for (auto [i, j] : tet_edges)
        keys.push_back(edge_key(c[i], c[j]));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

Index find_edge(const std::vector<std::uint64_t> &keys, Index a, Index b)
{
  const auto it = std::lower_bound(keys.begin(), keys.end(), edge_key(a, b));
  if (it == keys.end() || *it != edge_key(a, b))
    throw MeshError("edge not found in mesh");
  return static_cast<Index>(it - keys.begin());
}

SimplicialMesh structured_square_mesh(double x0, double y0, int nx, int ny, double h,
                                      const auto &keep_square)
{
  SimplicialMesh mesh;
  mesh.dim = 2;
  std::vector<Index> id((nx + 1) * (ny + 1), -1);
  auto lattice = [&](int i, int j) -> Index & { return id[j * (nx + 1) + i]; };

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (keep_square(i, j))
        for (int dj = 0; dj < 2; ++dj)
          for (int di = 0; di < 2; ++di)
            lattice(i + di, j + dj) = 0;

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (lattice(i, j) == 0)
      {
        lattice(i, j) = mesh.n_vertices();
        mesh.vertices.push_back({x0 + i * h, y0 + j * h, 0.0});
      }

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
    {
      if (!keep_square(i, j))
        continue;
      const Index ll = lattice(i, j), lr = lattice(i + 1, j);
      const Index ul = lattice(i, j + 1), ur = lattice(i + 1, j + 1);
      mesh.cells.push_back({ll, lr, ur, -1});
      mesh.cells.push_back({ll, ur, ul, -1});
    }

  normalize_orientation(mesh);
  extract_boundary_facets(mesh);
  return mesh;
}

} // namespace

double signed_volume(const SimplicialMesh &mesh, Index cell)
{
  const Cell &c = mesh.cells[cell];
  const Point &p0 = mesh.vertices[c[0]];
  const Point a = sub(mesh.vertices[c[1]], p0);
  const Point b = sub(mesh.vertices[c[2]], p0);
  if (mesh.dim == 2)
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  const Point d = sub(mesh.vertices[c[3]], p0);
  return (a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0]) +
          a[2] * (b[0] * d[1] - b[1] * d[0])) /
         6.0;
}

double total_volume(const SimplicialMesh &mesh)
{
  double sum = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c)
    sum += signed_volume(mesh, c);
  return sum;
}

double cell_diameter(const SimplicialMesh &mesh, Index cell)
{
  const Cell &c = mesh.cells[cell];
  double d2 = 0.0;
  for (int i = 0; i <= mesh.dim; ++i)
    for (int j = i + 1; j <= mesh.dim; ++j)
      d2 = std::max(d2, dist2(mesh.vertices[c[i]], mesh.vertices[c[j]]));
  return std::sqrt(d2);
}

double mesh_size(const SimplicialMesh &mesh)
{
  double h = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c)
    h = std::max(h, cell_diameter(mesh, c));
  return h;
}

void normalize_orientation(SimplicialMesh &mesh)
{
  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    const double v = signed_volume(mesh, c);
    if (v == 0.0 || !std::isfinite(v))
      throw MeshError("degenerate cell " + std::to_string(c));
    if (v < 0.0)
      std::swap(mesh.cells[c][mesh.dim - 1], mesh.cells[c][mesh.dim]);
  }
}

void extract_boundary_facets(SimplicialMesh &mesh)
{
  std::vector<Facet> all;
  all.reserve(mesh.cells.size() * (mesh.dim + 1));
  for (const Cell &c : mesh.cells)
    for (int omit = 0; omit <= mesh.dim; ++omit)
      all.push_back(sorted_facet(c, mesh.dim, omit));
  std::sort(all.begin(), all.end());

  mesh.boundary_facets.clear();
  for (std::size_t i = 0; i < all.size();)
  {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i])
      ++j;
    if (j - i == 1)
      mesh.boundary_facets.push_back(all[i]);
    i = j;
  }
}

FacetCensus facet_census(const SimplicialMesh &mesh)
{
  std::vector<Facet> all;
  all.reserve(mesh.cells.size() * (mesh.dim + 1));
  for (const Cell &c : mesh.cells)
    for (int omit = 0; omit <= mesh.dim; ++omit)
      all.push_back(sorted_facet(c, mesh.dim, omit));
  std::sort(all.begin(), all.end());

  FacetCensus census;
  std::vector<Facet> single;
  for (std::size_t i = 0; i < all.size();)
  {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i])
      ++j;
    switch (j - i)
    {
    case 1:
      ++census.boundary;
      single.push_back(all[i]);
      break;
    case 2:
      ++census.interior;
      break;
    default:
      ++census.overloaded;
    }
    i = j;
  }

  std::vector<Facet> declared = mesh.boundary_facets;
  for (Facet &f : declared)
  {
    for (int k = mesh.dim; k < 3; ++k)
      f[k] = -1;
    std::sort(f.begin(), f.begin() + mesh.dim);
  }
  std::sort(declared.begin(), declared.end());
  census.boundary_matches = declared == single;
  return census;
}

bool is_conforming(const SimplicialMesh &mesh)
{
  const FacetCensus census = facet_census(mesh);
  return census.overloaded == 0 && census.boundary_matches;
}

SimplicialMesh generate_lshape(int n)
{
  if (n < 1)
    throw MeshError("generate_lshape: n must be >= 1");
  // Squares with lower-left corner in [0,1) x [-1,0) are cut away.
  auto keep = [n](int i, int j) { return !(i >= n && j < n); };
  return structured_square_mesh(-1.0, -1.0, 2 * n, 2 * n, 1.0 / n, keep);
}

SimplicialMesh generate_unit_square(int n)
{
  if (n < 1)
    throw MeshError("generate_unit_square: n must be >= 1");
  return structured_square_mesh(0.0, 0.0, n, n, 1.0 / n, [](int, int) { return true; });
}

std::array<Point, 6> hexagon_vertices()
{
  const double s = 1.0 / std::sqrt(3.0);
  return {{{-s, 1.0, 0.0}, {s, 1.0, 0.0}, {2.0 * s, 0.0, 0.0}, {s, -1.0, 0.0}, {-s, -1.0, 0.0}, {-s - 0.1, 0.0, 0.0}}};
}

SimplicialMesh generate_hexagon(int fan_subdivisions)
{
  if (fan_subdivisions < 0)
    throw MeshError("generate_hexagon: fan_subdivisions must be >= 0");
  const auto corners = hexagon_vertices();

  // Area centroid of the polygon.
  double area = 0.0, cx = 0.0, cy = 0.0;
  for (int i = 0; i < 6; ++i)
  {
    const Point &p = corners[i], &q = corners[(i + 1) % 6];
    const double cross = p[0] * q[1] - q[0] * p[1];
    area += cross;
    cx += (p[0] + q[0]) * cross;
    cy += (p[1] + q[1]) * cross;
  }
  area *= 0.5;
  cx /= 6.0 * area;
  cy /= 6.0 * area;

  SimplicialMesh mesh;
  mesh.dim = 2;
  mesh.vertices.assign(corners.begin(), corners.end());
  mesh.vertices.push_back({cx, cy, 0.0});
  for (Index i = 0; i < 6; ++i)
    mesh.cells.push_back({6, i, static_cast<Index>((i + 1) % 6), -1});
  normalize_orientation(mesh);
  extract_boundary_facets(mesh);

  for (int r = 0; r < fan_subdivisions; ++r)
    mesh = refine_uniform(mesh);
  mesh.level = 0;
  mesh.parent_of_cell.clear();
  return mesh;
}

SimplicialMesh generate_cube(int n)
{
  if (n < 1)
    throw MeshError("generate_cube: n must be >= 1");
  SimplicialMesh mesh;
  mesh.dim = 3;
  const double h = 1.0 / n;
  auto id = [n](int i, int j, int k) { return static_cast<Index>((k * (n + 1) + j) * (n + 1) + i); };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        mesh.vertices.push_back({i * h, j * h, k * h});

  // Kuhn subdivision: one tetrahedron per axis permutation, all sharing the
  // main diagonal of the subcube.
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto &p : perms)
        {
          std::array<int, 3> ijk{i, j, k};
          Cell c{};
          c[0] = id(ijk[0], ijk[1], ijk[2]);
          for (int s = 0; s < 3; ++s)
          {
            ++ijk[p[s]];
            c[s + 1] = id(ijk[0], ijk[1], ijk[2]);
          }
          mesh.cells.push_back(c);
        }

  normalize_orientation(mesh);
  extract_boundary_facets(mesh);
  return mesh;
}

SimplicialMesh refine_uniform(const SimplicialMesh &mesh)
{
  const std::vector<std::uint64_t> edges = edge_list(mesh);
  const Index nv = mesh.n_vertices();

  SimplicialMesh fine;
  fine.dim = mesh.dim;
  fine.level = mesh.level + 1;
  fine.vertices.reserve(nv + edges.size());
  fine.vertices = mesh.vertices;
  for (std::uint64_t key : edges)
  {
    const auto a = static_cast<Index>(key >> 32);
    const auto b = static_cast<Index>(key & 0xffffffffu);
    fine.vertices.push_back(midpoint(mesh.vertices[a], mesh.vertices[b]));
  }
  auto mid = [&](Index a, Index b) { return nv + find_edge(edges, a, b); };

  const int children = mesh.dim == 2 ? 4 : 8;
  fine.cells.reserve(mesh.cells.size() * children);
  fine.parent_of_cell.reserve(mesh.cells.size() * children);

  for (Index ci = 0; ci < mesh.n_cells(); ++ci)
  {
    const Cell &c = mesh.cells[ci];
    if (mesh.dim == 2)
    {
      const Index m01 = mid(c[0], c[1]), m12 = mid(c[1], c[2]), m02 = mid(c[0], c[2]);
      fine.cells.push_back({c[0], m01, m02, -1});
      fine.cells.push_back({m01, c[1], m12, -1});
      fine.cells.push_back({m02, m12, c[2], -1});
      fine.cells.push_back({m01, m12, m02, -1});
    }
    else
    {
      const Index m01 = mid(c[0], c[1]), m02 = mid(c[0], c[2]), m03 = mid(c[0], c[3]);
      const Index m12 = mid(c[1], c[2]), m13 = mid(c[1], c[3]), m23 = mid(c[2], c[3]);
      fine.cells.push_back({c[0], m01, m02, m03});
      fine.cells.push_back({m01, c[1], m12, m13});
      fine.cells.push_back({m02, m12, c[2], m23});
      fine.cells.push_back({m03, m13, m23, c[3]});

      // Interior octahedron: cut along the shortest of its three diagonals.
      // Each diagonal is listed with the 4-cycle of remaining vertices.
      struct Diagonal
      {
        Index a, b;
        std::array<Index, 4> ring;
      };
      const std::array<Diagonal, 3> diagonals{{
          {m01, m23, {m02, m12, m13, m03}},
          {m02, m13, {m01, m12, m23, m03}},
          {m03, m12, {m01, m02, m23, m13}},
      }};
      int best = 0;
      double best_len = dist2(fine.vertices[diagonals[0].a], fine.vertices[diagonals[0].b]);
      for (int d = 1; d < 3; ++d)
      {
        const double len = dist2(fine.vertices[diagonals[d].a], fine.vertices[diagonals[d].b]);
        const double tie = 1e-12 * best_len;
        const bool lex_smaller = std::minmax(diagonals[d].a, diagonals[d].b) <
                                 std::minmax(diagonals[best].a, diagonals[best].b);
        if (len < best_len - tie || (len <= best_len + tie && lex_smaller))
        {
          best = d;
          best_len = len;
        }
      }
      const Diagonal &dg = diagonals[best];
      for (int s = 0; s < 4; ++s)
        fine.cells.push_back({dg.a, dg.b, dg.ring[s], dg.ring[(s + 1) % 4]});
    }
    for (int s = 0; s < children; ++s)
      fine.parent_of_cell.push_back(ci);
  }

  if (mesh.dim == 3)
  {
    // Octahedron children were emitted without regard to orientation.
    for (Index ci = 0; ci < fine.n_cells(); ++ci)
      if (signed_volume(fine, ci) < 0.0)
        std::swap(fine.cells[ci][2], fine.cells[ci][3]);
  }

  fine.boundary_facets.reserve(mesh.boundary_facets.size() * (mesh.dim == 2 ? 2 : 4));
  for (const Facet &f : mesh.boundary_facets)
  {
    if (mesh.dim == 2)
    {
      const Index m = mid(f[0], f[1]);
      fine.boundary_facets.push_back({f[0], m, -1});
      fine.boundary_facets.push_back({m, f[1], -1});
    }
    else
    {
      const Index m01 = mid(f[0], f[1]), m12 = mid(f[1], f[2]), m02 = mid(f[0], f[2]);
      fine.boundary_facets.push_back({f[0], m01, m02});
      fine.boundary_facets.push_back({m01, f[1], m12});
      fine.boundary_facets.push_back({m02, m12, f[2]});
      fine.boundary_facets.push_back({m01, m12, m02});
    }
  }
  return fine;
}

Bary barycentric(const SimplicialMesh &mesh, Index cell, const Point &x)
{
  const Cell &c = mesh.cells[cell];
  const Point &p0 = mesh.vertices[c[0]];
  const Point r = sub(x, p0);
  Bary lam{0.0, 0.0, 0.0, 0.0};
  if (mesh.dim == 2)
  {
    const Point a = sub(mesh.vertices[c[1]], p0);
    const Point b = sub(mesh.vertices[c[2]], p0);
    const double det = a[0] * b[1] - a[1] * b[0];
    lam[1] = (r[0] * b[1] - r[1] * b[0]) / det;
    lam[2] = (a[0] * r[1] - a[1] * r[0]) / det;
    lam[0] = 1.0 - lam[1] - lam[2];
    return lam;
  }
  const Point a = sub(mesh.vertices[c[1]], p0);
  const Point b = sub(mesh.vertices[c[2]], p0);
  const Point d = sub(mesh.vertices[c[3]], p0);
  auto det3 = [](const Point &u, const Point &v, const Point &w) {
    return u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0]);
  };
  const double det = det3(a, b, d);
  lam[1] = det3(r, b, d) / det;
  lam[2] = det3(a, r, d) / det;
  lam[3] = det3(a, b, r) / det;
  lam[0] = 1.0 - lam[1] - lam[2] - lam[3];
  return lam;
}

Point from_barycentric(const SimplicialMesh &mesh, Index cell, const Bary &bary)
{
  Point x{0.0, 0.0, 0.0};
  const Cell &c = mesh.cells[cell];
  for (int i = 0; i <= mesh.dim; ++i)
    for (int k = 0; k < 3; ++k)
      x[k] += bary[i] * mesh.vertices[c[i]][k];
  return x;
}

namespace detail
{

std::optional<Location> accept_location(const SimplicialMesh &mesh, Index cell, const Point &x)
{
  Bary lam = barycentric(mesh, cell, x);
  double sum = 0.0;
  for (int i = 0; i <= mesh.dim; ++i)
  {
    if (!(lam[i] >= -tol_geom))
      return std::nullopt;
    lam[i] = std::clamp(lam[i], 0.0, 1.0);
    sum += lam[i];
  }
  for (int i = 0; i <= mesh.dim; ++i)
    lam[i] /= sum;
  return Location{cell, lam};
}

} // namespace detail

std::optional<Location> locate_point(const SimplicialMesh &mesh, const Point &x)
{
  for (Index c = 0; c < mesh.n_cells(); ++c)
    if (auto loc = detail::accept_location(mesh, c, x))
      return loc;
  return std::nullopt;
}

bool RegionPredicate::contains(const Point &x) const
{
  switch (kind)
  {
  case Kind::whole_domain:
    return true;
  case Kind::ball:
    return std::sqrt(dist2(x, center)) < radius;
  case Kind::ball_complement:
    return std::sqrt(dist2(x, center)) > radius;
  }
  return false;
}

std::string to_string(RegionPredicate::Kind kind)
{
  switch (kind)
  {
  case RegionPredicate::Kind::whole_domain:
    return "whole_domain";
  case RegionPredicate::Kind::ball:
    return "ball";
  case RegionPredicate::Kind::ball_complement:
    return "ball_complement";
  }
  return "?";
}

RegionPredicate::Kind region_kind_from_string(const std::string &name)
{
  if (name == "whole_domain")
    return RegionPredicate::Kind::whole_domain;
  if (name == "ball")
    return RegionPredicate::Kind::ball;
  if (name == "ball_complement")
    return RegionPredicate::Kind::ball_complement;
  throw std::invalid_argument("unknown region kind '" + name + "'");
}

std::vector<Index> select_cells(const SimplicialMesh &mesh, const RegionPredicate &region)
{
  std::vector<Index> selected;
  if (region.kind == RegionPredicate::Kind::whole_domain)
    selected.reserve(mesh.cells.size());
  std::vector<char> inside(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    inside[v] = region.contains(mesh.vertices[v]);
  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    bool all = true;
    for (int i = 0; i <= mesh.dim && all; ++i)
      all = inside[mesh.cells[c][i]];
    if (all)
      selected.push_back(c);
  }
  return selected;
}

void write_mesh(const SimplicialMesh &mesh, std::ostream &out)
{
  out << mesh.dim << ' ' << mesh.vertices.size() << ' ' << mesh.cells.size() << ' ' << mesh.boundary_facets.size()
      << '\n';
  out << std::setprecision(17);
  for (const Point &p : mesh.vertices)
  {
    for (int k = 0; k < mesh.dim; ++k)
      out << (k ? " " : "") << p[k];
    out << '\n';
  }
  for (const Cell &c : mesh.cells)
  {
    for (int k = 0; k <= mesh.dim; ++k)
      out << (k ? " " : "") << c[k];
    out << '\n';
  }
  for (const Facet &f : mesh.boundary_facets)
  {
    for (int k = 0; k < mesh.dim; ++k)
      out << (k ? " " : "") << f[k];
    out << '\n';
  }
}

SimplicialMesh read_mesh(std::istream &in)
{
  SimplicialMesh mesh;
  std::size_t nv = 0, nc = 0, nb = 0;
  if (!(in >> mesh.dim >> nv >> nc >> nb) || (mesh.dim != 2 && mesh.dim != 3))
    throw MeshError("read_mesh: bad header");
  mesh.vertices.assign(nv, Point{0.0, 0.0, 0.0});
  mesh.cells.assign(nc, Cell{-1, -1, -1, -1});
  mesh.boundary_facets.assign(nb, Facet{-1, -1, -1});
  for (Point &p : mesh.vertices)
    for (int k = 0; k < mesh.dim; ++k)
      if (!(in >> p[k]))
        throw MeshError("read_mesh: truncated vertex block");
  for (Cell &c : mesh.cells)
    for (int k = 0; k <= mesh.dim; ++k)
      if (!(in >> c[k]) || c[k] < 0 || static_cast<std::size_t>(c[k]) >= nv)
        throw MeshError("read_mesh: bad cell block");
  for (Facet &f : mesh.boundary_facets)
    for (int k = 0; k < mesh.dim; ++k)
      if (!(in >> f[k]) || f[k] < 0 || static_cast<std::size_t>(f[k]) >= nv)
        throw MeshError("read_mesh: bad boundary block");
  return mesh;
}

} // namespace measfem
