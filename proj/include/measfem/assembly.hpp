#pragma once

#include "measfem/fespace.hpp"
#include "measfem/measure.hpp"
#include "measfem/sparse.hpp"

#include <functional>
#include <optional>
#include <utility>

namespace measfem
{

using Matrix3 = std::array<std::array<double, 3>, 3>;

class AssemblyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Symmetric, uniformly elliptic diffusion tensor A(x).
struct CoefficientField
{
  /// Empty means the constant matrix `constant`.
  std::function<Matrix3(const Point &)> evaluator;
  Matrix3 constant{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  double lambda_min = 1.0;
  double lambda_max = 1.0;

  bool is_constant() const { return !evaluator; }
  Matrix3 at(const Point &x) const { return evaluator ? evaluator(x) : constant; }

  static CoefficientField identity() { return {}; }
  static CoefficientField scalar(double a);
};

/// Quadrature exactness used for the stiffness matrix.
int stiffness_quadrature_degree(int degree, bool constant_coefficient);

/// Structurally symmetric pattern with all element couplings, values zero.
CsrMatrix sparsity_pattern(const FESpace &V);

CsrMatrix assemble_stiffness(const FESpace &V, const CoefficientField &A);
CsrMatrix assemble_mass(const FESpace &V);

/// Minimum distance from the boundary allowed for atoms and polyline samples.
inline constexpr double min_boundary_distance = 1e-8;

/// Gauss points per polyline segment for curve atoms.
inline constexpr int curve_gauss_points = 4;

/// b_i = <mu, phi_i>. The locator, if given, must belong to V's mesh.
DenseVector assemble_measure_rhs(const FESpace &V, const MeasureData &mu, const PointLocator *locator = nullptr);

/// b_i = int f phi_i with quadrature exact to degree 2k (or quad_degree if set).
DenseVector assemble_l2_rhs(const FESpace &V, const std::function<double(const Point &)> &f,
                            std::optional<int> quad_degree = std::nullopt);

/// Symmetric elimination of masked DOFs: rows and columns zeroed, unit
/// diagonal, zero right-hand side. The sparsity structure is kept.
std::pair<CsrMatrix, DenseVector> apply_dirichlet(const CsrMatrix &K, const DenseVector &b,
                                                  const std::vector<char> &mask);

} // namespace measfem
