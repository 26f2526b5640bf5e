#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace measfem
{

using DenseVector = std::vector<double>;

/// Compressed sparse row storage; column indices strictly increasing per row.
struct CsrMatrix
{
  std::int64_t n = 0;
  std::vector<std::int64_t> row_offsets{0};
  std::vector<std::int32_t> col_indices;
  std::vector<double> values;

  std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

  /// Position of (i, j) in values, or -1 if structurally absent.
  std::int64_t find(std::int64_t i, std::int64_t j) const;
  double at(std::int64_t i, std::int64_t j) const;

  DenseVector diagonal() const;
  double max_abs() const;

  static CsrMatrix identity(std::int64_t n);

  /// Builds from (row, col, value) triplets, summing duplicates.
  static CsrMatrix from_triplets(std::int64_t n, std::span<const std::int64_t> rows,
                                 std::span<const std::int64_t> cols, std::span<const double> vals);
};

struct SolveStats
{
  std::int64_t iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
};

class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

void spmv(const CsrMatrix &A, std::span<const double> x, std::span<double> y);
DenseVector spmv(const CsrMatrix &A, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// 50 sqrt(n) + 1000.
std::int64_t default_max_iterations(std::int64_t n);

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Converged iff ||b - A x||_2 <= tol ||b||_2.
DenseVector cg_solve(const CsrMatrix &A, std::span<const double> b, double tol, std::int64_t max_iter,
                     SolveStats &stats);

bool is_structurally_symmetric(const CsrMatrix &A);
double symmetry_defect(const CsrMatrix &A);

/// Matrix Market coordinate (general, real) dump.
void write_matrix_market(const CsrMatrix &A, std::ostream &out);

} // namespace measfem
