#include "measfem/analysis.hpp"

#include "measfem/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

namespace measfem
{

namespace
{

std::string describe(const RegionPredicate &r)
{
  std::ostringstream s;
  s << to_string(r.kind);
  if (r.kind != RegionPredicate::Kind::whole_domain)
    s << "(center=(" << r.center[0] << ", " << r.center[1] << ", " << r.center[2] << "), r=" << r.radius << ")";
  return s.str();
}

std::vector<Index> checked_selection(const SimplicialMesh &mesh, const RegionPredicate &region)
{
  std::vector<Index> cells = select_cells(mesh, region);
  if (cells.empty())
    throw AnalysisError("region " + describe(region) + " selects no cells");
  return cells;
}

// Sum over quadrature points of |e|^2 or |grad e|^2 where e = sum_f - sum_g
// with f, g discrete functions on the same mesh (g may be null).
double integrate_difference(const FEFunction &f, const FEFunction *g, const std::vector<Index> &cells, Norm norm)
{
  const FESpace &Vf = *f.space;
  const SimplicialMesh &mesh = Vf.mesh();
  const int dim = mesh.dim;
  const int kg = g ? g->space->degree() : 0;
  const QuadratureRule &rule = quadrature_for(dim, std::min(6, 2 * std::max(Vf.degree(), kg)));

  std::vector<BasisEval> bf(rule.size()), bg(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
  {
    eval_basis(Vf.degree(), dim, rule.points[q], bf[q]);
    if (g)
      eval_basis(kg, dim, rule.points[q], bg[q]);
  }

  double sum = 0.0;
  for (Index c : cells)
  {
    const auto df = Vf.cell_dofs(c);
    const std::span<const Index> dg = g ? g->space->cell_dofs(c) : std::span<const Index>{};
    double cell_sum = 0.0;
    if (norm == Norm::L2)
    {
      const double vol = std::abs(signed_volume(mesh, c));
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        double e = 0.0;
        for (std::size_t j = 0; j < df.size(); ++j)
          e += f.coefficients[df[j]] * bf[q].values[j];
        for (std::size_t j = 0; j < dg.size(); ++j)
          e -= g->coefficients[dg[j]] * bg[q].values[j];
        cell_sum += rule.weights[q] * e * e;
      }
      sum += vol * cell_sum;
    }
    else
    {
      const CellGeometry geo = cell_geometry(mesh, c);
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        Bary db{0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < df.size(); ++j)
          for (int i = 0; i <= dim; ++i)
            db[i] += f.coefficients[df[j]] * bf[q].grads[j][i];
        for (std::size_t j = 0; j < dg.size(); ++j)
          for (int i = 0; i <= dim; ++i)
            db[i] -= g->coefficients[dg[j]] * bg[q].grads[j][i];
        const Point grad = physical_gradient(geo, db, dim);
        cell_sum += rule.weights[q] * (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
      }
      sum += geo.volume * cell_sum;
    }
  }
  return std::sqrt(sum);
}

std::string sanitize(const std::string &s)
{
  std::string out;
  for (char ch : s)
    out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return out;
}

std::string fmt(const char *format, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

} // namespace

RefinementLadder::RefinementLadder(SimplicialMesh initial, int top_level)
{
  if (top_level < 0)
    throw AnalysisError("ladder top level must be >= 0");
  meshes_.push_back(std::make_shared<const SimplicialMesh>(std::move(initial)));
  for (int l = 1; l <= top_level; ++l)
    meshes_.push_back(std::make_shared<const SimplicialMesh>(refine_uniform(*meshes_.back())));
}

std::shared_ptr<const FESpace> RefinementLadder::space(int level, int degree) const
{
  std::lock_guard lock(mutex_);
  auto &slot = spaces_[{level, degree}];
  if (!slot)
    slot = build_space(meshes_.at(level), degree);
  return slot;
}

int RefinementLadder::level_of(const FESpace &V) const
{
  for (std::size_t l = 0; l < meshes_.size(); ++l)
    if (meshes_[l].get() == &V.mesh())
      return static_cast<int>(l);
  throw AnalysisError("function space does not live on this refinement ladder");
}

std::vector<Index> RefinementLadder::ancestors(int fine_level, int coarse_level) const
{
  if (coarse_level > fine_level || coarse_level < 0 || fine_level > top_level())
    throw AnalysisError("ancestors: need 0 <= coarse <= fine <= top");
  std::vector<Index> anc(mesh(fine_level)->cells.size());
  for (std::size_t c = 0; c < anc.size(); ++c)
    anc[c] = static_cast<Index>(c);
  for (int l = fine_level; l > coarse_level; --l)
  {
    const auto &parent = mesh(l)->parent_of_cell;
    if (parent.size() != mesh(l)->cells.size())
      throw AnalysisError("ancestors: missing parent map on level " + std::to_string(l));
    for (Index &a : anc)
      a = parent[a];
  }
  return anc;
}

FEFunction prolong(const FEFunction &coarse, const RefinementLadder &ladder, int target_level)
{
  const int level = ladder.level_of(*coarse.space);
  if (target_level < level)
    throw AnalysisError("prolong: target level below source level");
  if (target_level == level)
    return coarse;

  const SimplicialMesh &coarse_mesh = coarse.space->mesh();
  const auto fine_space = ladder.space(target_level, coarse.space->degree());
  const std::vector<Index> anc = ladder.ancestors(target_level, level);
  const auto &coords = fine_space->dof_coords();

  FEFunction fine{fine_space, DenseVector(fine_space->n_dofs(), 0.0)};
  std::vector<char> done(fine_space->n_dofs(), 0);
  const SimplicialMesh &fine_mesh = fine_space->mesh();
  for (Index c = 0; c < fine_mesh.n_cells(); ++c)
  {
    for (Index dof : fine_space->cell_dofs(c))
    {
      if (done[dof])
        continue;
      Bary lam = barycentric(coarse_mesh, anc[c], coords[dof]);
      for (int i = 0; i <= coarse_mesh.dim; ++i)
        if (lam[i] < -1e-8)
          throw AnalysisError("prolong: DOF " + std::to_string(dof) + " not inside its ancestor cell " +
                              std::to_string(anc[c]));
      fine.coefficients[dof] = evaluate_in_cell(coarse, anc[c], lam);
      done[dof] = 1;
    }
  }
  return fine;
}

double error_norm(const FEFunction &u_l, const FEFunction &u_ref, const RefinementLadder &ladder,
                  const RegionPredicate &region, Norm norm)
{
  const int ref_level = ladder.level_of(*u_ref.space);
  const FEFunction fine = prolong(u_l, ladder, ref_level);
  return integrate_difference(fine, &u_ref, checked_selection(u_ref.space->mesh(), region), norm);
}

double function_norm(const FEFunction &u, const RegionPredicate &region, Norm norm)
{
  return integrate_difference(u, nullptr, checked_selection(u.space->mesh(), region), norm);
}

double error_norm_exact(const FEFunction &u, const std::function<double(const Point &)> &exact,
                        const std::function<Point(const Point &)> &exact_gradient, const RegionPredicate &region,
                        Norm norm)
{
  const FESpace &V = *u.space;
  const SimplicialMesh &mesh = V.mesh();
  const int dim = mesh.dim;
  const QuadratureRule &rule = quadrature_for(dim, 6);
  std::vector<BasisEval> basis(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    eval_basis(V.degree(), dim, rule.points[q], basis[q]);

  double sum = 0.0;
  for (Index c : checked_selection(mesh, region))
  {
    const auto dofs = V.cell_dofs(c);
    const CellGeometry geo = cell_geometry(mesh, c);
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const Point x = from_barycentric(mesh, c, rule.points[q]);
      if (norm == Norm::L2)
      {
        double e = -exact(x);
        for (std::size_t j = 0; j < dofs.size(); ++j)
          e += u.coefficients[dofs[j]] * basis[q].values[j];
        cell_sum += rule.weights[q] * e * e;
      }
      else
      {
        Bary db{0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < dofs.size(); ++j)
          for (int i = 0; i <= dim; ++i)
            db[i] += u.coefficients[dofs[j]] * basis[q].grads[j][i];
        Point g = physical_gradient(geo, db, dim);
        const Point ge = exact_gradient(x);
        double e2 = 0.0;
        for (int k = 0; k < dim; ++k)
          e2 += (g[k] - ge[k]) * (g[k] - ge[k]);
        cell_sum += rule.weights[q] * e2;
      }
    }
    sum += geo.volume * cell_sum;
  }
  return std::sqrt(sum);
}

std::vector<std::optional<double>> compute_rates(const std::vector<double> &errors)
{
  std::vector<std::optional<double>> rates(errors.size());
  for (std::size_t l = 1; l < errors.size(); ++l)
    if (errors[l - 1] > 0.0 && errors[l] > 0.0 && std::isfinite(errors[l - 1]) && std::isfinite(errors[l]))
      rates[l] = std::log(errors[l - 1] / errors[l]) / std::log(2.0);
  return rates;
}

const ErrorColumn &ConvergenceReport::column(Norm norm, const std::string &region) const
{
  for (const ErrorColumn &c : columns)
    if (c.norm == norm && c.region == region)
      return c;
  throw AnalysisError("report has no column " + to_string(norm) + "/" + region);
}

std::string ConvergenceReport::to_csv() const
{
  std::ostringstream out;
  out << "level,h,n_dofs";
  for (const ErrorColumn &c : columns)
  {
    const std::string key = to_string(c.norm) + "_" + sanitize(c.region);
    out << ',' << key << "_error," << key << "_rate";
  }
  out << '\n';
  for (std::size_t r = 0; r < levels.size(); ++r)
  {
    out << levels[r] << ',' << fmt("%.10e", h[r]) << ',' << n_dofs[r];
    for (const ErrorColumn &c : columns)
    {
      out << ',' << fmt("%.10e", c.errors[r]) << ',';
      if (c.rates[r])
        out << fmt("%.4f", *c.rates[r]);
    }
    out << '\n';
  }
  return out.str();
}

std::string ConvergenceReport::to_markdown() const
{
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"N_ref", "h"};
  for (const ErrorColumn &c : columns)
  {
    header.push_back((c.norm == Norm::L2 ? "L2(" : "H1(") + c.region + ")");
    header.push_back("Rate");
  }
  table.push_back(header);
  for (std::size_t r = 0; r < levels.size(); ++r)
  {
    std::vector<std::string> row{std::to_string(levels[r]), fmt("%.3e", h[r])};
    for (const ErrorColumn &c : columns)
    {
      row.push_back(fmt("%.2e", c.errors[r]));
      row.push_back(c.rates[r] ? fmt("%.2f", *c.rates[r]) : "---");
    }
    table.push_back(row);
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto &row : table)
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());

  std::ostringstream out;
  out << "**" << (name.empty() ? domain : name) << "**, k = " << degree << ", scheme = " << to_string(scheme)
      << ", reference = "
      << (reference == ErrorReference::exact
              ? std::string("exact solution")
              : "level " + std::to_string(reference_level) + " (k = " + std::to_string(reference_degree) + ")")
      << "\n\n";
  auto emit = [&](const std::vector<std::string> &row) {
    out << '|';
    for (std::size_t i = 0; i < row.size(); ++i)
      out << ' ' << std::string(width[i] - row[i].size(), ' ') << row[i] << " |";
    out << '\n';
  };
  emit(table[0]);
  out << '|';
  for (std::size_t w : width)
    out << std::string(w + 1, '-') << ":|";
  out << '\n';
  for (std::size_t r = 1; r < table.size(); ++r)
    emit(table[r]);
  return out.str();
}

DiscreteSolution solve_level(const ExperimentConfig &config, const RefinementLadder &ladder, int level, int degree,
                             SchemeTag scheme, const MeasureData *mu)
{
  const auto V = ladder.space(level, degree);
  const int dim = V->dim();
  DenseVector load;
  if (mu)
    load = assemble_measure_rhs(*V, *mu);
  else
  {
    const SmoothSpec spec = config.smooth.value_or(SmoothSpec{});
    load = assemble_l2_rhs(*V, [&](const Point &x) { return smooth_load(spec, dim, x); }, 6);
  }
  const CoefficientField A = CoefficientField::identity();
  try
  {
    return scheme == SchemeTag::standard ? solve_standard(V, A, load, config.solver_tol)
                                         : solve_berggren(V, A, load, config.solver_tol);
  }
  catch (const SolverError &e)
  {
    throw StudyError(level, e.what());
  }
}

std::vector<ConvergenceReport> run_study(const ExperimentConfig &config)
{
  validate(config);
  const bool exact = config.reference == ErrorReference::exact;
  const int top = exact ? config.level_max : config.reference_level;
  const RefinementLadder ladder(build_initial_mesh(config.domain), top);

  std::optional<MeasureData> mu;
  if (config.measure)
    mu = build_measure(*config.measure);
  const MeasureData *mu_ptr = mu ? &*mu : nullptr;

  std::vector<SchemeTag> schemes;
  if (config.scheme != SchemeChoice::berggren)
    schemes.push_back(SchemeTag::standard);
  if (config.scheme != SchemeChoice::standard)
    schemes.push_back(SchemeTag::berggren);

  const int n_levels = config.level_max - config.level_min + 1;
  std::vector<ConvergenceReport> reports;
  for (SchemeTag scheme : schemes)
  {
    std::optional<DiscreteSolution> reference;
    if (!exact)
      reference = solve_level(config, ladder, config.reference_level, config.effective_reference_degree(), scheme,
                              mu_ptr);

    ConvergenceReport report;
    report.name = config.name;
    report.domain = to_string(config.domain.kind);
    report.degree = config.degree;
    report.scheme = scheme;
    report.reference = config.reference;
    report.reference_level = exact ? -1 : config.reference_level;
    report.reference_degree = config.effective_reference_degree();
    for (Norm norm : config.norms)
      for (const NamedRegion &r : config.regions)
        report.columns.push_back({norm, r.name, std::vector<double>(n_levels), {}});
    report.levels.resize(n_levels);
    report.h.resize(n_levels);
    report.n_dofs.resize(n_levels);

    // Each level writes only its own row, so rows can be filled concurrently.
    auto work = [&](int i) {
      const int level = config.level_min + i;
      const DiscreteSolution sol = solve_level(config, ladder, level, config.degree, scheme, mu_ptr);
      report.levels[i] = level;
      report.h[i] = mesh_size(*ladder.mesh(level));
      report.n_dofs[i] = sol.u.space->n_dofs();
      std::size_t col = 0;
      for (Norm norm : config.norms)
        for (const NamedRegion &r : config.regions)
        {
          double e;
          if (exact)
          {
            const SmoothSpec spec = *config.smooth;
            const int dim = config.domain.dim();
            e = error_norm_exact(
                sol.u, [&](const Point &x) { return smooth_exact(spec, dim, x); },
                [&](const Point &x) { return smooth_exact_gradient(spec, dim, x); }, r.region, norm);
          }
          else
            e = error_norm(sol.u, reference->u, ladder, r.region, norm);
          report.columns[col++].errors[i] = e;
        }
    };

    const int threads = std::clamp(config.threads, 1, n_levels);
    if (threads == 1)
    {
      for (int i = 0; i < n_levels; ++i)
        work(i);
    }
    else
    {
      std::atomic<int> next{0};
      std::vector<std::exception_ptr> failures(n_levels);
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (int i = next++; i < n_levels; i = next++)
          {
            try
            {
              work(i);
            }
            catch (...)
            {
              failures[i] = std::current_exception();
            }
          }
        });
      for (auto &th : pool)
        th.join();
      for (const auto &f : failures)
        if (f)
          std::rethrow_exception(f);
    }

    for (ErrorColumn &c : report.columns)
      c.rates = compute_rates(c.errors);
    reports.push_back(std::move(report));
  }
  return reports;
}

} // namespace measfem
