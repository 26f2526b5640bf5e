#include "measfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>

namespace measfem
{

std::int64_t CsrMatrix::find(std::int64_t i, std::int64_t j) const
{
  const auto begin = col_indices.begin() + row_offsets[i];
  const auto end = col_indices.begin() + row_offsets[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(j));
  if (it == end || *it != j)
    return -1;
  return it - col_indices.begin();
}

double CsrMatrix::at(std::int64_t i, std::int64_t j) const
{
  const std::int64_t p = find(i, j);
  return p < 0 ? 0.0 : values[p];
}

DenseVector CsrMatrix::diagonal() const
{
  DenseVector d(n, 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    d[i] = at(i, i);
  return d;
}

double CsrMatrix::max_abs() const
{
  double m = 0.0;
  for (double v : values)
    m = std::max(m, std::abs(v));
  return m;
}

CsrMatrix CsrMatrix::identity(std::int64_t n)
{
  CsrMatrix A;
  A.n = n;
  A.row_offsets.resize(n + 1);
  A.col_indices.resize(n);
  A.values.assign(n, 1.0);
  for (std::int64_t i = 0; i <= n; ++i)
    A.row_offsets[i] = i;
  for (std::int64_t i = 0; i < n; ++i)
    A.col_indices[i] = static_cast<std::int32_t>(i);
  return A;
}

CsrMatrix CsrMatrix::from_triplets(std::int64_t n, std::span<const std::int64_t> rows,
                                   std::span<const std::int64_t> cols, std::span<const double> vals)
{
  if (rows.size() != cols.size() || rows.size() != vals.size())
    throw std::invalid_argument("from_triplets: length mismatch");
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });

  CsrMatrix A;
  A.n = n;
  A.row_offsets.assign(n + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k)
  {
    const std::size_t t = order[k];
    if (rows[t] < 0 || rows[t] >= n || cols[t] < 0 || cols[t] >= n)
      throw std::out_of_range("from_triplets: index out of range");
    if (k > 0 && rows[order[k - 1]] == rows[t] && cols[order[k - 1]] == cols[t])
    {
      A.values.back() += vals[t];
      continue;
    }
    A.col_indices.push_back(static_cast<std::int32_t>(cols[t]));
    A.values.push_back(vals[t]);
    ++A.row_offsets[rows[t] + 1];
  }
  for (std::int64_t i = 0; i < n; ++i)
    A.row_offsets[i + 1] += A.row_offsets[i];
  return A;
}

void spmv(const CsrMatrix &A, std::span<const double> x, std::span<double> y)
{
  if (static_cast<std::int64_t>(x.size()) != A.n || static_cast<std::int64_t>(y.size()) != A.n)
    throw std::invalid_argument("spmv: dimension mismatch");
  const auto *off = A.row_offsets.data();
  const auto *col = A.col_indices.data();
  const auto *val = A.values.data();
  for (std::int64_t i = 0; i < A.n; ++i)
  {
    double s = 0.0;
    for (std::int64_t p = off[i]; p < off[i + 1]; ++p)
      s += val[p] * x[col[p]];
    y[i] = s;
  }
}

DenseVector spmv(const CsrMatrix &A, std::span<const double> x)
{
  DenseVector y(A.n);
  spmv(A, x, y);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::int64_t default_max_iterations(std::int64_t n)
{
  return static_cast<std::int64_t>(50.0 * std::sqrt(static_cast<double>(n))) + 1000;
}

DenseVector cg_solve(const CsrMatrix &A, std::span<const double> b, double tol, std::int64_t max_iter,
                     SolveStats &stats)
{
  const std::int64_t n = A.n;
  if (static_cast<std::int64_t>(b.size()) != n)
    throw std::invalid_argument("cg_solve: dimension mismatch");

  DenseVector x(n, 0.0);
  stats = SolveStats{};
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
  {
    stats.converged = true;
    return x;
  }

  DenseVector inv_diag = A.diagonal();
  for (double &d : inv_diag)
  {
    if (!(d > 0.0))
      throw SolverError("cg_solve: non-positive diagonal entry, operator is not SPD");
    d = 1.0 / d;
  }

  DenseVector r(b.begin(), b.end()), z(n), p(n), q(n);
  for (std::int64_t i = 0; i < n; ++i)
    z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = bnorm;

  constexpr std::int64_t replace_every = 50;
  std::int64_t it = 0;
  while (rnorm > tol * bnorm && it < max_iter)
  {
    spmv(A, p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw SolverError("cg_solve: breakdown (p^T A p <= 0)");
    const double alpha = rz / pq;
    double rr = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
    {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      rr += r[i] * r[i];
    }
    rnorm = std::sqrt(rr);
    ++it;

    // Periodic residual replacement, accumulated in extended precision,
    // stops the recursive residual from drifting away from b - A x.
    if (rnorm <= tol * bnorm || it % replace_every == 0)
    {
      double true_rr = 0.0;
      for (std::int64_t i = 0; i < n; ++i)
      {
        long double s = b[i];
        for (std::int64_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
          s -= static_cast<long double>(A.values[k]) * x[A.col_indices[k]];
        r[i] = static_cast<double>(s);
        true_rr += r[i] * r[i];
      }
      rnorm = std::sqrt(true_rr);
      if (rnorm <= tol * bnorm)
        break;
    }

    double rz_new = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
    {
      z[i] = inv_diag[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::int64_t i = 0; i < n; ++i)
      p[i] = z[i] + beta * p[i];
  }

  stats.iterations = it;
  stats.final_relative_residual = rnorm / bnorm;
  stats.converged = stats.final_relative_residual <= tol;
  return x;
}

bool is_structurally_symmetric(const CsrMatrix &A)
{
  for (std::int64_t i = 0; i < A.n; ++i)
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
      if (A.find(A.col_indices[p], i) < 0)
        return false;
  return true;
}

double symmetry_defect(const CsrMatrix &A)
{
  double d = 0.0;
  for (std::int64_t i = 0; i < A.n; ++i)
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
      d = std::max(d, std::abs(A.values[p] - A.at(A.col_indices[p], i)));
  return d;
}

void write_matrix_market(const CsrMatrix &A, std::ostream &out)
{
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.n << ' ' << A.n << ' ' << A.nnz() << '\n' << std::setprecision(17);
  for (std::int64_t i = 0; i < A.n; ++i)
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
      out << i + 1 << ' ' << A.col_indices[p] + 1 << ' ' << A.values[p] << '\n';
}

} // namespace measfem
