#pragma once

#include "measfem/assembly.hpp"

#include <optional>
#include <string>

namespace measfem
{

enum class SchemeTag
{
  standard,
  berggren
};

std::string to_string(SchemeTag tag);
SchemeTag scheme_from_string(const std::string &name);

struct DiscreteSolution
{
  FEFunction u;
  SolveStats stats;                      // the stiffness solve
  std::optional<SolveStats> mass_stats;  // second (mass) solve, very weak scheme only
  SchemeTag scheme = SchemeTag::standard;
  double tol = 0.0;
};

/// Default relative residual tolerance for the CG solves.
inline constexpr double default_solver_tol = 1e-12;

/// Galerkin solve: a(u_h, w) = <mu, w> for all w in V_{h,0}.
DiscreteSolution solve_standard(std::shared_ptr<const FESpace> V, const CoefficientField &A, const MeasureData &mu,
                                double tol = default_solver_tol);
DiscreteSolution solve_standard(std::shared_ptr<const FESpace> V, const CoefficientField &A, const DenseVector &load,
                                double tol = default_solver_tol);

/// Very weak scheme: (u_h, v) = <mu, z_h(v)> with a(z_h(v), w) = (v, w).
DiscreteSolution solve_berggren(std::shared_ptr<const FESpace> V, const CoefficientField &A, const MeasureData &mu,
                                double tol = default_solver_tol);
DiscreteSolution solve_berggren(std::shared_ptr<const FESpace> V, const CoefficientField &A, const DenseVector &load,
                                double tol = default_solver_tol);

struct BerggrenResult
{
  DenseVector w; // K w = b
  DenseVector u; // M u = M w
  SolveStats stiffness_stats;
  SolveStats mass_stats;
};

/**
 * Matrix form of the very weak scheme on already-eliminated operators.
 * v -> <mu, z_h(v)> is the vector M K^{-1} b (K symmetric), so u solves
 * M u = M K^{-1} b. Throws SolverError if either solve fails to converge.
 */
BerggrenResult berggren_solve(const CsrMatrix &K, const CsrMatrix &M, const DenseVector &b, double tol);

/// max_i |u_i - v_i| / max_i |u_i|.
double relative_max_discrepancy(const DenseVector &u, const DenseVector &v);

} // namespace measfem
