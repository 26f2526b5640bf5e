#include "measfem/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace measfem
{

namespace
{

constexpr std::array<std::array<int, 2>, 3> tri_edges{{{0, 1}, {1, 2}, {0, 2}}};
constexpr std::array<std::array<int, 2>, 6> tet_edges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

std::span<const std::array<int, 2>> local_edges(int dim)
{
  if (dim == 2)
    return tri_edges;
  return tet_edges;
}

std::vector<NodeIndex> make_local_nodes(int dim, int k)
{
  std::vector<NodeIndex> nodes;
  for (int i = 0; i <= dim; ++i)
  {
    NodeIndex a{0, 0, 0, 0};
    a[i] = k;
    nodes.push_back(a);
  }
  for (auto [a, b] : local_edges(dim))
    for (int j = 1; j < k; ++j)
    {
      NodeIndex n{0, 0, 0, 0};
      n[a] = k - j;
      n[b] = j;
      nodes.push_back(n);
    }
  if (k == 3)
  {
    if (dim == 2)
      nodes.push_back({1, 1, 1, 0});
    else
      for (int omit = 0; omit < 4; ++omit)
      {
        NodeIndex n{1, 1, 1, 1};
        n[omit] = 0;
        nodes.push_back(n);
      }
  }
  return nodes;
}

// P_m(t) = prod_{j<m} (k t - j) / (j + 1) and its derivative.
void lagrange_factor(int m, int k, double t, double &value, double &deriv)
{
  value = 1.0;
  deriv = 0.0;
  for (int j = 0; j < m; ++j)
  {
    const double f = (k * t - j) / (j + 1);
    deriv = deriv * f + value * k / (j + 1);
    value *= f;
  }
}

std::uint64_t edge_key(Index a, Index b)
{
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

using FaceKey = std::array<Index, 3>;

FaceKey face_key(Index a, Index b, Index c)
{
  FaceKey f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

template <typename Key>
Index lookup(const std::vector<Key> &keys, const Key &key)
{
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key)
    throw FESpaceError("entity lookup failed while numbering DOFs");
  return static_cast<Index>(it - keys.begin());
}

} // namespace

int n_local_dofs(int dim, int degree)
{
  return static_cast<int>(local_nodes(dim, degree).size());
}

const std::vector<NodeIndex> &local_nodes(int dim, int degree)
{
  static const std::array<std::array<std::vector<NodeIndex>, 3>, 2> table = [] {
    std::array<std::array<std::vector<NodeIndex>, 3>, 2> t;
    for (int d = 2; d <= 3; ++d)
      for (int k = 1; k <= 3; ++k)
        t[d - 2][k - 1] = make_local_nodes(d, k);
    return t;
  }();
  if ((dim != 2 && dim != 3) || degree < 1 || degree > 3)
    throw FESpaceError("unsupported element: dim " + std::to_string(dim) + ", degree " + std::to_string(degree));
  return table[dim - 2][degree - 1];
}

void eval_basis(int degree, int dim, const Bary &bary, BasisEval &out)
{
  const auto &nodes = local_nodes(dim, degree);
  out.values.resize(nodes.size());
  out.grads.resize(nodes.size());

  // Factor tables P_m(lambda_i) for m = 0..degree.
  std::array<std::array<double, 4>, 4> val{}, der{};
  for (int i = 0; i <= dim; ++i)
    for (int m = 0; m <= degree; ++m)
      lagrange_factor(m, degree, bary[i], val[i][m], der[i][m]);

  for (std::size_t n = 0; n < nodes.size(); ++n)
  {
    const NodeIndex &a = nodes[n];
    double v = 1.0;
    for (int i = 0; i <= dim; ++i)
      v *= val[i][a[i]];
    out.values[n] = v;
    Bary g{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i <= dim; ++i)
    {
      double gi = der[i][a[i]];
      for (int j = 0; j <= dim; ++j)
        if (j != i)
          gi *= val[j][a[j]];
      g[i] = gi;
    }
    out.grads[n] = g;
  }
}

BasisEval eval_basis(int degree, int dim, const Bary &bary)
{
  BasisEval out;
  eval_basis(degree, dim, bary, out);
  return out;
}

CellGeometry cell_geometry(const SimplicialMesh &mesh, Index cell)
{
  const Cell &c = mesh.cells[cell];
  const Point &p0 = mesh.vertices[c[0]];
  CellGeometry geo;
  geo.volume = signed_volume(mesh, cell);
  if (!(std::abs(geo.volume) > 0.0))
    throw MeshError("degenerate cell " + std::to_string(cell));

  if (mesh.dim == 2)
  {
    const double a0 = mesh.vertices[c[1]][0] - p0[0], a1 = mesh.vertices[c[1]][1] - p0[1];
    const double b0 = mesh.vertices[c[2]][0] - p0[0], b1 = mesh.vertices[c[2]][1] - p0[1];
    const double det = a0 * b1 - a1 * b0;
    // Rows of the inverse Jacobian.
    geo.grad_lambda[1] = {b1 / det, -b0 / det, 0.0};
    geo.grad_lambda[2] = {-a1 / det, a0 / det, 0.0};
  }
  else
  {
    std::array<Point, 3> col;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        col[j][k] = mesh.vertices[c[j + 1]][k] - p0[k];
    auto cross = [](const Point &u, const Point &v) {
      return Point{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    };
    const Point c12 = cross(col[1], col[2]);
    const double det = col[0][0] * c12[0] + col[0][1] * c12[1] + col[0][2] * c12[2];
    const Point c20 = cross(col[2], col[0]);
    const Point c01 = cross(col[0], col[1]);
    for (int k = 0; k < 3; ++k)
    {
      geo.grad_lambda[1][k] = c12[k] / det;
      geo.grad_lambda[2][k] = c20[k] / det;
      geo.grad_lambda[3][k] = c01[k] / det;
    }
  }
  for (int k = 0; k < 3; ++k)
  {
    double s = 0.0;
    for (int i = 1; i <= mesh.dim; ++i)
      s += geo.grad_lambda[i][k];
    geo.grad_lambda[0][k] = -s;
  }
  geo.volume = std::abs(geo.volume);
  return geo;
}

FESpace::FESpace(std::shared_ptr<const SimplicialMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree)
{
  if (degree < 1 || degree > 3)
    throw FESpaceError("Lagrange degree must be 1, 2 or 3 (got " + std::to_string(degree) + ")");
  const SimplicialMesh &m = *mesh_;
  const int dim = m.dim;
  const auto &nodes = local_nodes(dim, degree);
  dofs_per_cell_ = static_cast<int>(nodes.size());

  std::vector<std::uint64_t> edges;
  std::vector<FaceKey> faces;
  if (degree >= 2)
  {
    edges.reserve(m.cells.size() * local_edges(dim).size());
    for (const Cell &c : m.cells)
      for (auto [a, b] : local_edges(dim))
        edges.push_back(edge_key(c[a], c[b]));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  if (degree == 3 && dim == 3)
  {
    faces.reserve(m.cells.size() * 4);
    for (const Cell &c : m.cells)
      for (int omit = 0; omit < 4; ++omit)
      {
        std::array<Index, 3> f{};
        int j = 0;
        for (int i = 0; i < 4; ++i)
          if (i != omit)
            f[j++] = c[i];
        faces.push_back(face_key(f[0], f[1], f[2]));
      }
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  }
  n_edges_ = static_cast<Index>(edges.size());
  n_faces_ = degree == 3 ? (dim == 2 ? m.n_cells() : static_cast<Index>(faces.size())) : 0;

  const Index nv = m.n_vertices();
  const Index edge_base = nv;
  const Index face_base = nv + (degree - 1) * n_edges_;
  n_dofs_ = face_base + n_faces_;

  cell_dofs_.resize(static_cast<std::size_t>(m.n_cells()) * dofs_per_cell_);
  dof_coords_.assign(n_dofs_, Point{0.0, 0.0, 0.0});
  for (Index ci = 0; ci < m.n_cells(); ++ci)
  {
    const Cell &c = m.cells[ci];
    Index *dofs = cell_dofs_.data() + static_cast<std::size_t>(ci) * dofs_per_cell_;
    int n = 0;
    for (int i = 0; i <= dim; ++i)
      dofs[n++] = c[i];
    for (auto [a, b] : local_edges(dim))
    {
      if (degree < 2)
        break;
      const Index e = lookup(edges, edge_key(c[a], c[b]));
      const bool forward = c[a] < c[b];
      for (int j = 1; j < degree; ++j)
      {
        const int t = forward ? j - 1 : degree - 1 - j;
        dofs[n++] = edge_base + e * (degree - 1) + t;
      }
    }
    if (degree == 3)
    {
      if (dim == 2)
        dofs[n++] = face_base + ci;
      else
        for (int omit = 0; omit < 4; ++omit)
        {
          std::array<Index, 3> f{};
          int j = 0;
          for (int i = 0; i < 4; ++i)
            if (i != omit)
              f[j++] = c[i];
          dofs[n++] = face_base + lookup(faces, face_key(f[0], f[1], f[2]));
        }
    }

    for (int l = 0; l < dofs_per_cell_; ++l)
    {
      Point x{0.0, 0.0, 0.0};
      for (int i = 0; i <= dim; ++i)
        for (int k = 0; k < 3; ++k)
          x[k] += nodes[l][i] * m.vertices[c[i]][k];
      for (int k = 0; k < 3; ++k)
        x[k] /= degree;
      dof_coords_[dofs[l]] = x;
    }
  }

  boundary_mask_.assign(n_dofs_, 0);
  for (const Facet &f : m.boundary_facets)
  {
    for (int i = 0; i < dim; ++i)
      boundary_mask_[f[i]] = 1;
    if (degree >= 2)
    {
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
        {
          const Index e = lookup(edges, edge_key(f[i], f[j]));
          for (int t = 0; t < degree - 1; ++t)
            boundary_mask_[edge_base + e * (degree - 1) + t] = 1;
        }
    }
    if (degree == 3 && dim == 3)
      boundary_mask_[face_base + lookup(faces, face_key(f[0], f[1], f[2]))] = 1;
  }
}

std::shared_ptr<const FESpace> build_space(std::shared_ptr<const SimplicialMesh> mesh, int degree)
{
  return std::make_shared<const FESpace>(std::move(mesh), degree);
}

double evaluate_in_cell(const FEFunction &f, Index cell, const Bary &bary)
{
  const FESpace &V = *f.space;
  thread_local BasisEval basis;
  eval_basis(V.degree(), V.dim(), bary, basis);
  const auto dofs = V.cell_dofs(cell);
  double s = 0.0;
  for (std::size_t j = 0; j < dofs.size(); ++j)
    s += f.coefficients[dofs[j]] * basis.values[j];
  return s;
}

std::optional<double> evaluate(const FEFunction &f, const Point &x)
{
  const auto loc = locate_point(f.space->mesh(), x);
  if (!loc)
    return std::nullopt;
  return evaluate_in_cell(f, loc->cell, loc->bary);
}

std::optional<double> evaluate(const FEFunction &f, const Point &x, const PointLocator &locator)
{
  const auto loc = locator.locate(x);
  if (!loc)
    return std::nullopt;
  return evaluate_in_cell(f, loc->cell, loc->bary);
}

FEFunction interpolate(std::shared_ptr<const FESpace> space, const std::function<double(const Point &)> &fn)
{
  FEFunction f{std::move(space), {}};
  f.coefficients.resize(f.space->n_dofs());
  const auto &coords = f.space->dof_coords();
  for (Index i = 0; i < f.space->n_dofs(); ++i)
    f.coefficients[i] = fn(coords[i]);
  return f;
}

void write_function(const FEFunction &f, std::ostream &out)
{
  out << f.coefficients.size() << ' ' << f.space->degree() << '\n' << std::setprecision(17);
  for (double c : f.coefficients)
    out << c << '\n';
}

DenseVector read_function(std::istream &in, int *degree)
{
  std::size_t n = 0;
  int k = 0;
  if (!(in >> n >> k) || k < 1 || k > 3)
    throw FESpaceError("read_function: bad header");
  DenseVector c(n);
  for (double &v : c)
    if (!(in >> v))
      throw FESpaceError("read_function: truncated coefficient list");
  if (degree)
    *degree = k;
  return c;
}

} // namespace measfem
