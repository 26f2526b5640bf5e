#include "measfem/assembly.hpp"

#include "measfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace measfem
{

namespace
{

std::string format_point(const Point &x, int dim)
{
  std::ostringstream s;
  s.precision(10);
  s << '(';
  for (int k = 0; k < dim; ++k)
    s << (k ? ", " : "") << x[k];
  s << ')';
  return s.str();
}

Point map_to_cell(const SimplicialMesh &mesh, Index cell, const Bary &bary)
{
  return from_barycentric(mesh, cell, bary);
}

void scatter(CsrMatrix &A, std::span<const Index> dofs, const std::vector<double> &local)
{
  const std::size_t n = dofs.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
    {
      const std::int64_t p = A.find(dofs[a], dofs[b]);
      A.values[p] += local[a * n + b];
    }
}

} // namespace

CoefficientField CoefficientField::scalar(double a)
{
  CoefficientField f;
  for (int i = 0; i < 3; ++i)
    f.constant[i][i] = a;
  f.lambda_min = f.lambda_max = a;
  return f;
}

int stiffness_quadrature_degree(int degree, bool constant_coefficient)
{
  if (constant_coefficient)
    return std::max(2 * (degree - 1), 1);
  return std::min(6, std::max(2 * (degree - 1), degree + 2));
}

CsrMatrix sparsity_pattern(const FESpace &V)
{
  const SimplicialMesh &m = V.mesh();
  const Index n = V.n_dofs();

  // DOF -> incident cells.
  std::vector<std::int64_t> start(n + 1, 0);
  for (Index c = 0; c < m.n_cells(); ++c)
    for (Index d : V.cell_dofs(c))
      ++start[d + 1];
  for (Index i = 0; i < n; ++i)
    start[i + 1] += start[i];
  std::vector<Index> incident(start.back());
  {
    std::vector<std::int64_t> fill(start.begin(), start.end() - 1);
    for (Index c = 0; c < m.n_cells(); ++c)
      for (Index d : V.cell_dofs(c))
        incident[fill[d]++] = c;
  }

  CsrMatrix A;
  A.n = n;
  A.row_offsets.assign(n + 1, 0);
  std::vector<std::int32_t> row;
  row.reserve(256);
  for (Index i = 0; i < n; ++i)
  {
    row.clear();
    for (std::int64_t p = start[i]; p < start[i + 1]; ++p)
      for (Index d : V.cell_dofs(incident[p]))
        row.push_back(d);
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    A.col_indices.insert(A.col_indices.end(), row.begin(), row.end());
    A.row_offsets[i + 1] = static_cast<std::int64_t>(A.col_indices.size());
  }
  A.values.assign(A.col_indices.size(), 0.0);
  return A;
}

CsrMatrix assemble_stiffness(const FESpace &V, const CoefficientField &A)
{
  const SimplicialMesh &m = V.mesh();
  const int dim = m.dim;
  const int nloc = V.dofs_per_cell();
  const QuadratureRule &rule = quadrature_for(dim, stiffness_quadrature_degree(V.degree(), A.is_constant()));

  // Basis barycentric gradients at the quadrature points do not depend on the cell.
  std::vector<BasisEval> basis(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    eval_basis(V.degree(), dim, rule.points[q], basis[q]);

  CsrMatrix K = sparsity_pattern(V);
  std::vector<double> local(static_cast<std::size_t>(nloc) * nloc);
  std::vector<Point> grads(nloc);
  for (Index c = 0; c < m.n_cells(); ++c)
  {
    const CellGeometry geo = cell_geometry(m, c);
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const Matrix3 a = A.is_constant() ? A.constant : A.at(map_to_cell(m, c, rule.points[q]));
      for (int j = 0; j < nloc; ++j)
        grads[j] = physical_gradient(geo, basis[q].grads[j], dim);
      const double w = rule.weights[q] * geo.volume;
      for (int i = 0; i < nloc; ++i)
      {
        Point ag{0.0, 0.0, 0.0};
        for (int r = 0; r < dim; ++r)
          for (int s = 0; s < dim; ++s)
            ag[r] += a[r][s] * grads[i][s];
        for (int j = 0; j < nloc; ++j)
          local[i * nloc + j] += w * (ag[0] * grads[j][0] + ag[1] * grads[j][1] + ag[2] * grads[j][2]);
      }
    }
    scatter(K, V.cell_dofs(c), local);
  }
  return K;
}

CsrMatrix assemble_mass(const FESpace &V)
{
  const SimplicialMesh &m = V.mesh();
  const int dim = m.dim;
  const int nloc = V.dofs_per_cell();
  const QuadratureRule &rule = quadrature_for(dim, 2 * V.degree());

  // On affine cells the element mass matrix is volume times a reference matrix.
  std::vector<double> reference(static_cast<std::size_t>(nloc) * nloc, 0.0);
  BasisEval basis;
  for (std::size_t q = 0; q < rule.size(); ++q)
  {
    eval_basis(V.degree(), dim, rule.points[q], basis);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j)
        reference[i * nloc + j] += rule.weights[q] * basis.values[i] * basis.values[j];
  }

  CsrMatrix M = sparsity_pattern(V);
  std::vector<double> local(reference.size());
  for (Index c = 0; c < m.n_cells(); ++c)
  {
    const double vol = std::abs(signed_volume(m, c));
    if (!(vol > 0.0))
      throw AssemblyError("degenerate cell " + std::to_string(c));
    for (std::size_t i = 0; i < local.size(); ++i)
      local[i] = vol * reference[i];
    scatter(M, V.cell_dofs(c), local);
  }
  return M;
}

DenseVector assemble_measure_rhs(const FESpace &V, const MeasureData &mu, const PointLocator *locator)
{
  const SimplicialMesh &m = V.mesh();
  const int dim = m.dim;
  try
  {
    check_well_formed(mu);
  }
  catch (const std::invalid_argument &e)
  {
    throw AssemblyError(e.what());
  }

  std::optional<PointLocator> own;
  if (!locator && !mu.empty())
  {
    own.emplace(m);
    locator = &*own;
  }

  DenseVector b(V.n_dofs(), 0.0);
  BasisEval basis;
  auto deposit = [&](const Location &loc, double w) {
    eval_basis(V.degree(), dim, loc.bary, basis);
    const auto dofs = V.cell_dofs(loc.cell);
    for (std::size_t j = 0; j < dofs.size(); ++j)
      b[dofs[j]] += w * basis.values[j];
  };

  for (std::size_t i = 0; i < mu.points.size(); ++i)
  {
    const PointAtom &atom = mu.points[i];
    const auto loc = locator->locate(atom.x);
    if (!loc)
      throw AssemblyError("point atom " + std::to_string(i) + " at " + format_point(atom.x, dim) +
                          " lies outside the domain");
    if (locator->near_boundary(atom.x, min_boundary_distance))
      throw AssemblyError("point atom " + std::to_string(i) + " at " + format_point(atom.x, dim) +
                          " is closer than 1e-8 to the boundary");
    deposit(*loc, atom.weight);
  }

  const GaussRule1D &gauss = gauss_legendre_01(curve_gauss_points);
  for (std::size_t ci = 0; ci < mu.curves.size(); ++ci)
  {
    const CurveAtom &curve = mu.curves[ci];
    const std::string label = "curve atom " + std::to_string(ci) + (curve.name.empty() ? "" : " (" + curve.name + ")");
    for (const CurveSample &s : curve.polyline)
    {
      if (!locator->locate(s.x))
        throw AssemblyError(label + ": sample " + format_point(s.x, dim) + " lies outside the domain");
      if (locator->near_boundary(s.x, min_boundary_distance))
        throw AssemblyError(label + ": sample " + format_point(s.x, dim) + " is closer than 1e-8 to the boundary");
    }
    for (std::size_t seg = 1; seg < curve.polyline.size(); ++seg)
    {
      const Point &a = curve.polyline[seg - 1].x;
      const Point &c = curve.polyline[seg].x;
      const Point d{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
      const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
      for (std::size_t q = 0; q < gauss.points.size(); ++q)
      {
        const double s = gauss.points[q];
        const Point x{a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]};
        const auto loc = locator->locate(x);
        if (!loc)
          throw AssemblyError(label + ": quadrature point " + format_point(x, dim) + " not found in mesh");
        deposit(*loc, curve.weight * len * gauss.weights[q]);
      }
    }
  }
  return b;
}

DenseVector assemble_l2_rhs(const FESpace &V, const std::function<double(const Point &)> &f,
                            std::optional<int> quad_degree)
{
  const SimplicialMesh &m = V.mesh();
  const int dim = m.dim;
  const QuadratureRule &rule = quadrature_for(dim, quad_degree.value_or(2 * V.degree()));
  std::vector<BasisEval> basis(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    eval_basis(V.degree(), dim, rule.points[q], basis[q]);

  DenseVector b(V.n_dofs(), 0.0);
  for (Index c = 0; c < m.n_cells(); ++c)
  {
    const double vol = std::abs(signed_volume(m, c));
    const auto dofs = V.cell_dofs(c);
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const double fw = f(map_to_cell(m, c, rule.points[q])) * rule.weights[q] * vol;
      if (fw == 0.0)
        continue;
      for (std::size_t j = 0; j < dofs.size(); ++j)
        b[dofs[j]] += fw * basis[q].values[j];
    }
  }
  return b;
}

std::pair<CsrMatrix, DenseVector> apply_dirichlet(const CsrMatrix &K, const DenseVector &b,
                                                  const std::vector<char> &mask)
{
  if (static_cast<std::int64_t>(mask.size()) != K.n || static_cast<std::int64_t>(b.size()) != K.n)
    throw std::invalid_argument("apply_dirichlet: size mismatch");
  CsrMatrix A = K;
  DenseVector rhs = b;
  for (std::int64_t i = 0; i < A.n; ++i)
  {
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
    {
      const std::int32_t j = A.col_indices[p];
      if (mask[i] || mask[j])
        A.values[p] = (i == j) ? 1.0 : 0.0;
    }
    if (mask[i])
    {
      rhs[i] = 0.0;
      if (A.find(i, i) < 0)
        throw std::invalid_argument("apply_dirichlet: missing diagonal entry in row " + std::to_string(i));
    }
  }
  return {std::move(A), std::move(rhs)};
}

} // namespace measfem
