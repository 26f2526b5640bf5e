#pragma once

#include "measfem/mesh.hpp"

#include <vector>

namespace measfem
{

/// Symmetric rule on the reference simplex; weights sum to one.
struct QuadratureRule
{
  int dim = 2;
  int exact_degree = 0;
  std::vector<Bary> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Positive-weight rule exact at least to the requested degree (<= 6). The
/// returned rule reports its true exactness, which may exceed the request.
const QuadratureRule &quadrature_for(int dim, int exact_degree);

/// Gauss-Legendre points and weights on [0,1].
struct GaussRule1D
{
  std::vector<double> points;
  std::vector<double> weights;
};

const GaussRule1D &gauss_legendre_01(int n_points);

} // namespace measfem
