// Shared oracles and generators for the unit tests.
#pragma once

#include "measfem/fespace.hpp"
#include "measfem/mesh.hpp"
#include "measfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

namespace testing
{

using namespace measfem;

inline std::mt19937_64 &rng()
{
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double a = 0.0, double b = 1.0)
{
  return std::uniform_real_distribution<double>(a, b)(rng());
}

/// Uniformly distributed barycentric point (sorted-spacings method).
inline Bary random_bary(int dim)
{
  std::vector<double> cuts{0.0, 1.0};
  for (int i = 0; i < dim; ++i)
    cuts.push_back(uniform());
  std::sort(cuts.begin(), cuts.end());
  Bary b{0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i <= dim; ++i)
    b[i] = cuts[i + 1] - cuts[i];
  return b;
}

inline double factorial(int n)
{
  double f = 1.0;
  for (int i = 2; i <= n; ++i)
    f *= i;
  return f;
}

/// Mean of lambda^alpha over a d-simplex: d! alpha! / (|alpha| + d)!.
inline double monomial_mean(const std::array<int, 4> &alpha, int dim)
{
  int total = 0;
  double num = factorial(dim);
  for (int i = 0; i <= dim; ++i)
  {
    total += alpha[i];
    num *= factorial(alpha[i]);
  }
  return num / factorial(total + dim);
}

/// Single reference simplex (0, e1, ..., ed).
inline SimplicialMesh reference_simplex(int dim)
{
  SimplicialMesh m;
  m.dim = dim;
  m.vertices.push_back({0.0, 0.0, 0.0});
  for (int k = 0; k < dim; ++k)
  {
    Point p{0.0, 0.0, 0.0};
    p[k] = 1.0;
    m.vertices.push_back(p);
  }
  m.cells.push_back(dim == 2 ? Cell{0, 1, 2, 0} : Cell{0, 1, 2, 3});
  extract_boundary_facets(m);
  return m;
}

inline std::shared_ptr<const SimplicialMesh> share(SimplicialMesh m)
{
  return std::make_shared<const SimplicialMesh>(std::move(m));
}

inline SimplicialMesh refined(SimplicialMesh m, int times)
{
  for (int i = 0; i < times; ++i)
    m = refine_uniform(m);
  return m;
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b)
{
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c)
  {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c]))
        piv = r;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    if (A[c][c] == 0.0)
      throw std::runtime_error("dense_solve: singular");
    for (std::size_t r = c + 1; r < n; ++r)
    {
      const double f = A[r][c] / A[c][c];
      if (f == 0.0)
        continue;
      for (std::size_t k = c; k < n; ++k)
        A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;)
  {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k)
      s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

inline std::vector<std::vector<double>> to_dense(const CsrMatrix &A)
{
  std::vector<std::vector<double>> D(A.n, std::vector<double>(A.n, 0.0));
  for (std::int64_t i = 0; i < A.n; ++i)
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
      D[i][A.col_indices[p]] = A.values[p];
  return D;
}

/// Cholesky succeeds with positive pivots iff the matrix is SPD.
inline bool is_spd(std::vector<std::vector<double>> A)
{
  const std::size_t n = A.size();
  for (std::size_t j = 0; j < n; ++j)
  {
    double d = A[j][j];
    for (std::size_t k = 0; k < j; ++k)
      d -= A[j][k] * A[j][k];
    if (!(d > 0.0))
      return false;
    A[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i)
    {
      double s = A[i][j];
      for (std::size_t k = 0; k < j; ++k)
        s -= A[i][k] * A[j][k];
      A[i][j] = s / A[j][j];
    }
  }
  return true;
}

inline double distance(const Point &a, const Point &b)
{
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

} // namespace testing
