#pragma once

#include "measfem/mesh.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace measfem
{

using DenseVector = std::vector<double>;

/// Multi-index (in barycentric exponents) of a Lagrange node on the reference simplex.
using NodeIndex = std::array<int, 4>;

int n_local_dofs(int dim, int degree);

/**
 * Local Lagrange nodes in the canonical cell order: vertices, then the
 * (degree - 1) nodes of each local edge running from its first to its second
 * local vertex, then face nodes (degree 3 only).
 */
const std::vector<NodeIndex> &local_nodes(int dim, int degree);

/// Values and barycentric partial derivatives of all local shape functions.
struct BasisEval
{
  std::vector<double> values;
  std::vector<Bary> grads; // d phi_j / d lambda_i, treating lambdas as independent
};

void eval_basis(int degree, int dim, const Bary &bary, BasisEval &out);
BasisEval eval_basis(int degree, int dim, const Bary &bary);

/// Affine cell data: volume and gradients of the barycentric coordinates.
struct CellGeometry
{
  double volume = 0.0;
  std::array<Point, 4> grad_lambda{};
};

CellGeometry cell_geometry(const SimplicialMesh &mesh, Index cell);

/// Physical gradient of a shape function from its barycentric partials.
inline Point physical_gradient(const CellGeometry &geo, const Bary &dphi, int dim)
{
  Point g{0.0, 0.0, 0.0};
  for (int i = 0; i <= dim; ++i)
    for (int k = 0; k < 3; ++k)
      g[k] += dphi[i] * geo.grad_lambda[i][k];
  return g;
}

class FESpaceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * Continuous Lagrange space of degree 1..3 on a simplicial mesh.
 *
 * Global numbering: vertex DOFs carry the vertex index, then edge DOFs by
 * sorted edge (each edge's nodes ordered from its lower to its higher vertex
 * index), then face nodes (degree 3 only; cell interiors in 2D, sorted
 * triangular faces in 3D).
 */
class FESpace
{
public:
  FESpace(std::shared_ptr<const SimplicialMesh> mesh, int degree);

  const SimplicialMesh &mesh() const { return *mesh_; }
  const std::shared_ptr<const SimplicialMesh> &mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int dim() const { return mesh_->dim; }
  Index n_dofs() const { return n_dofs_; }
  int dofs_per_cell() const { return dofs_per_cell_; }

  std::span<const Index> cell_dofs(Index cell) const
  {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }

  const std::vector<Point> &dof_coords() const { return dof_coords_; }
  const std::vector<char> &boundary_mask() const { return boundary_mask_; }

  Index n_edges() const { return n_edges_; }
  Index n_faces() const { return n_faces_; }

private:
  std::shared_ptr<const SimplicialMesh> mesh_;
  int degree_;
  int dofs_per_cell_;
  Index n_dofs_ = 0;
  Index n_edges_ = 0;
  Index n_faces_ = 0;
  std::vector<Index> cell_dofs_;
  std::vector<Point> dof_coords_;
  std::vector<char> boundary_mask_;
};

std::shared_ptr<const FESpace> build_space(std::shared_ptr<const SimplicialMesh> mesh, int degree);

struct FEFunction
{
  std::shared_ptr<const FESpace> space;
  DenseVector coefficients;
};

/// Value of f at barycentric coordinates of a cell.
double evaluate_in_cell(const FEFunction &f, Index cell, const Bary &bary);

std::optional<double> evaluate(const FEFunction &f, const Point &x);
std::optional<double> evaluate(const FEFunction &f, const Point &x, const PointLocator &locator);

/// Lagrange interpolant (nodal values).
FEFunction interpolate(std::shared_ptr<const FESpace> space, const std::function<double(const Point &)> &fn);

/// "n_dofs k" header, then one coefficient per line.
void write_function(const FEFunction &f, std::ostream &out);
DenseVector read_function(std::istream &in, int *degree = nullptr);

} // namespace measfem
