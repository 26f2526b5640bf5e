#include "measfem/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace measfem
{

namespace
{

DenseVector solve_or_throw(const CsrMatrix &A, const DenseVector &b, double tol, SolveStats &stats, const char *what)
{
  DenseVector x = cg_solve(A, b, tol, default_max_iterations(A.n), stats);
  if (!stats.converged)
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: CG did not converge (%lld iterations, relative residual %.3e, tol %.1e)",
                  what, static_cast<long long>(stats.iterations), stats.final_relative_residual, tol);
    throw SolverError(buf);
  }
  return x;
}

} // namespace

std::string to_string(SchemeTag tag)
{
  return tag == SchemeTag::standard ? "standard" : "berggren";
}

SchemeTag scheme_from_string(const std::string &name)
{
  if (name == "standard")
    return SchemeTag::standard;
  if (name == "berggren")
    return SchemeTag::berggren;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

DiscreteSolution solve_standard(std::shared_ptr<const FESpace> V, const CoefficientField &A, const DenseVector &load,
                                double tol)
{
  const CsrMatrix K = assemble_stiffness(*V, A);
  auto [Kd, bd] = apply_dirichlet(K, load, V->boundary_mask());
  DiscreteSolution sol;
  sol.scheme = SchemeTag::standard;
  sol.tol = tol;
  sol.u.space = V;
  sol.u.coefficients = solve_or_throw(Kd, bd, tol, sol.stats, "stiffness solve");
  return sol;
}

DiscreteSolution solve_standard(std::shared_ptr<const FESpace> V, const CoefficientField &A, const MeasureData &mu,
                                double tol)
{
  return solve_standard(V, A, assemble_measure_rhs(*V, mu), tol);
}

BerggrenResult berggren_solve(const CsrMatrix &K, const CsrMatrix &M, const DenseVector &b, double tol)
{
  BerggrenResult r;
  r.w = solve_or_throw(K, b, tol, r.stiffness_stats, "stiffness solve");
  const DenseVector Mw = spmv(M, r.w);
  r.u = solve_or_throw(M, Mw, tol, r.mass_stats, "mass solve");
  return r;
}

DiscreteSolution solve_berggren(std::shared_ptr<const FESpace> V, const CoefficientField &A, const DenseVector &load,
                                double tol)
{
  const CsrMatrix K = assemble_stiffness(*V, A);
  const CsrMatrix M = assemble_mass(*V);
  auto [Kd, bd] = apply_dirichlet(K, load, V->boundary_mask());
  const DenseVector zero(V->n_dofs(), 0.0);
  const CsrMatrix Md = apply_dirichlet(M, zero, V->boundary_mask()).first;

  BerggrenResult r = berggren_solve(Kd, Md, bd, tol);
  DiscreteSolution sol;
  sol.scheme = SchemeTag::berggren;
  sol.tol = tol;
  sol.u.space = V;
  sol.u.coefficients = std::move(r.u);
  sol.stats = r.stiffness_stats;
  sol.mass_stats = r.mass_stats;
  return sol;
}

DiscreteSolution solve_berggren(std::shared_ptr<const FESpace> V, const CoefficientField &A, const MeasureData &mu,
                                double tol)
{
  return solve_berggren(V, A, assemble_measure_rhs(*V, mu), tol);
}

double relative_max_discrepancy(const DenseVector &u, const DenseVector &v)
{
  if (u.size() != v.size())
    throw std::invalid_argument("relative_max_discrepancy: size mismatch");
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    diff = std::max(diff, std::abs(u[i] - v[i]));
    scale = std::max(scale, std::abs(u[i]));
  }
  if (scale == 0.0)
    return diff;
  return diff / scale;
}

} // namespace measfem
