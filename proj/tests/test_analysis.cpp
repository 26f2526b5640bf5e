#include "support.hpp"

#include "measfem/analysis.hpp"

#include <doctest.h>

using namespace measfem;
using namespace testing;

namespace
{

double sine2d(const Point &x) { return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); }

ExperimentConfig small_example1()
{
  ExperimentConfig c = preset("example1");
  c.domain.param = 2;
  c.level_min = 0;
  c.level_max = 2;
  c.reference_level = 3;
  c.scheme = SchemeChoice::both;
  return c;
}

} // namespace

TEST_SUITE("analysis")
{
  TEST_CASE("rates")
  {
    const auto r = compute_rates({1.76e-2, 8.63e-3});
    REQUIRE(r.size() == 2);
    CHECK_FALSE(r[0].has_value());
    CHECK(*r[1] == doctest::Approx(1.03).epsilon(0.005));
    CHECK(*compute_rates({4e-4, 1e-4})[1] == doctest::Approx(2.0));
    CHECK(*compute_rates({3e-3, 3e-3})[1] == 0.0);
    CHECK_FALSE(compute_rates({1e-3, 0.0})[1].has_value());
    CHECK_FALSE(compute_rates({0.0, 1e-3})[1].has_value());
  }

  TEST_CASE("prolongation of a constant")
  {
    const RefinementLadder ladder(generate_lshape(2), 2);
    for (int k = 1; k <= 3; ++k)
    {
      const FEFunction c = interpolate(ladder.space(0, k), [](const Point &) { return 2.5; });
      const FEFunction f = prolong(c, ladder, 2);
      CHECK(f.space.get() == ladder.space(2, k).get());
      for (double v : f.coefficients)
        CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
    }
  }

  TEST_CASE("prolongation reproduces degree-k polynomials")
  {
    for (int dim : {2, 3})
    {
      const RefinementLadder ladder(dim == 2 ? generate_hexagon(0) : generate_cube(1), 2);
      for (int k = 1; k <= 3; ++k)
      {
        // random polynomial of total degree k
        std::vector<std::pair<std::array<int, 3>, double>> terms;
        for (int a = 0; a <= k; ++a)
          for (int b = 0; a + b <= k; ++b)
            for (int c = 0; a + b + c <= k && (dim == 3 || c == 0); ++c)
              terms.push_back({{a, b, c}, uniform(-1, 1)});
        const auto poly = [&](const Point &x) {
          double s = 0.0;
          for (const auto &[e, coef] : terms)
            s += coef * std::pow(x[0], e[0]) * std::pow(x[1], e[1]) * std::pow(x[2], e[2]);
          return s;
        };
        const FEFunction coarse = interpolate(ladder.space(0, k), poly);
        const FEFunction fine = prolong(coarse, ladder, 2);
        const FEFunction direct = interpolate(ladder.space(2, k), poly);
        for (std::size_t i = 0; i < fine.coefficients.size(); ++i)
          CHECK(std::abs(fine.coefficients[i] - direct.coefficients[i]) <= 1e-12);
      }
    }
  }

  TEST_CASE("prolongation preserves norms and values")
  {
    const RefinementLadder ladder(generate_unit_square(2), 3);
    for (int k = 1; k <= 3; ++k)
    {
      FEFunction u{ladder.space(0, k), DenseVector(ladder.space(0, k)->n_dofs())};
      for (double &v : u.coefficients)
        v = uniform(-1, 1);
      const FEFunction f = prolong(u, ladder, 3);
      for (Norm n : {Norm::L2, Norm::H1seminorm})
      {
        const double a = function_norm(u, RegionPredicate::whole(), n);
        const double b = function_norm(f, RegionPredicate::whole(), n);
        CHECK(b == doctest::Approx(a).epsilon(1e-12));
      }
      for (int trial = 0; trial < 20; ++trial)
      {
        const Point x{uniform(), uniform(), 0.0};
        CHECK(*evaluate(f, x) == doctest::Approx(*evaluate(u, x)).epsilon(1e-12).scale(1.0));
      }
      CHECK(error_norm(u, f, ladder, RegionPredicate::whole(), Norm::L2) <= 1e-13);
    }
  }

  TEST_CASE("error of a function against itself is zero")
  {
    const RefinementLadder ladder(generate_lshape(2), 1);
    const FEFunction u = interpolate(ladder.space(1, 2), sine2d);
    for (Norm n : {Norm::L2, Norm::H1seminorm})
      CHECK(error_norm(u, u, ladder, RegionPredicate::whole(), n) <= 1e-13);
  }

  TEST_CASE("L2 norm of the sine interpolant")
  {
    const RefinementLadder ladder(generate_unit_square(2), 4);
    const FEFunction u = interpolate(ladder.space(4, 3), sine2d);
    CHECK(function_norm(u, RegionPredicate::whole(), Norm::L2) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(function_norm(u, RegionPredicate::whole(), Norm::H1seminorm) ==
          doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-4));
  }

  TEST_CASE("region monotonicity")
  {
    const ExperimentConfig c = preset("example1");
    const RefinementLadder ladder(generate_lshape(2), 3);
    const MeasureData mu = build_measure(*c.measure);
    const FEFunction u1 = solve_standard(ladder.space(1, 1), CoefficientField::identity(), mu).u;
    const FEFunction u3 = solve_standard(ladder.space(3, 1), CoefficientField::identity(), mu).u;
    const Point src{-0.5, 0.5, 0.0};
    for (Norm n : {Norm::L2, Norm::H1seminorm})
    {
      const double whole = error_norm(u1, u3, ladder, RegionPredicate::whole(), n);
      double prev = 0.0;
      for (double r : {0.6, 0.4, 0.25, 0.15, 0.1})
      {
        const double e = error_norm(u1, u3, ladder, RegionPredicate::outside_ball(src, r), n);
        CHECK(e >= prev);
        CHECK(e <= whole * (1 + 1e-12));
        prev = e;
      }
      const double inner = error_norm(u1, u3, ladder, RegionPredicate::ball_at({0, 0, 0}, 0.3), n);
      CHECK(inner <= whole * (1 + 1e-12));
      // ball and complement split the cells, minus the straddling ones
      for (double r : {0.1, 0.25, 0.5})
      {
        const double in = error_norm(u1, u3, ladder, RegionPredicate::ball_at(src, r), n);
        const double out = error_norm(u1, u3, ladder, RegionPredicate::outside_ball(src, r), n);
        CHECK(std::sqrt(in * in + out * out) <= whole * (1 + 1e-12));
      }
    }
  }

  TEST_CASE("empty region is an error")
  {
    const RefinementLadder ladder(generate_lshape(2), 1);
    const FEFunction u = interpolate(ladder.space(1, 1), sine2d);
    const RegionPredicate nowhere = RegionPredicate::ball_at({5.0, 5.0, 0.0}, 0.1);
    CHECK_THROWS_AS(function_norm(u, nowhere, Norm::L2), AnalysisError);
    CHECK_THROWS_AS(error_norm(u, u, ladder, nowhere, Norm::L2), AnalysisError);
  }

  TEST_CASE("report output is deterministic and thread independent")
  {
    ExperimentConfig c = small_example1();
    c.threads = 1;
    const auto a = run_study(c);
    const auto b = run_study(c);
    c.threads = 3;
    const auto t = run_study(c);
    REQUIRE(a.size() == 2);
    for (std::size_t s = 0; s < a.size(); ++s)
    {
      CHECK(a[s].to_csv() == b[s].to_csv());
      CHECK(a[s].to_csv() == t[s].to_csv());
      CHECK(a[s].to_markdown() == t[s].to_markdown());
    }
    CHECK(a[0].scheme == SchemeTag::standard);
    CHECK(a[1].scheme == SchemeTag::berggren);
  }

  TEST_CASE("csv layout")
  {
    ExperimentConfig c = small_example1();
    c.scheme = SchemeChoice::standard;
    c.norms = {Norm::L2};
    c.regions.resize(2);
    const std::string csv = run_study(c).at(0).to_csv();
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header == "level,h,n_dofs,L2_Omega_error,L2_Omega_rate,L2_Omega_B1_error,L2_Omega_B1_rate");
    std::size_t lines = 0;
    for (char ch : csv)
      lines += ch == '\n';
    CHECK(lines == 4);
    // first data row has empty rate fields
    const std::string row0 = csv.substr(header.size() + 1, csv.find('\n', header.size() + 1) - header.size() - 1);
    CHECK(row0.rfind("0,", 0) == 0);
    CHECK(row0.back() == ',');
  }

  TEST_CASE("json round trip reproduces the report")
  {
    for (const std::string &name : preset_names())
    {
      const ExperimentConfig c = preset(name);
      const ExperimentConfig back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
      CHECK(to_json(back) == to_json(c));
    }
    const ExperimentConfig c = small_example1();
    const ExperimentConfig back = config_from_json(to_json(c));
    const auto a = run_study(c);
    const auto b = run_study(back);
    REQUIRE(a.size() == b.size());
    for (std::size_t s = 0; s < a.size(); ++s)
      CHECK(a[s].to_csv() == b[s].to_csv());
  }

  TEST_CASE("ladder bookkeeping")
  {
    const RefinementLadder ladder(generate_hexagon(0), 2);
    CHECK(ladder.top_level() == 2);
    CHECK(ladder.level_of(*ladder.space(1, 2)) == 1);
    const auto other = build_space(share(generate_hexagon(0)), 1);
    CHECK_THROWS(ladder.level_of(*other));
    const auto anc = ladder.ancestors(2, 0);
    CHECK(anc.size() == ladder.mesh(2)->cells.size());
    std::vector<int> children(ladder.mesh(0)->cells.size(), 0);
    for (Index a : anc)
      ++children.at(a);
    for (int n : children)
      CHECK(n == 16);
  }
}

TEST_SUITE("reference")
{
  TEST_CASE("discrete reference agrees with the exact solution on coarse levels")
  {
    ExperimentConfig exact = preset("calibration");
    exact.level_min = 1;
    exact.level_max = 4;
    ExperimentConfig discrete = exact;
    discrete.reference = ErrorReference::discrete;
    discrete.reference_level = 6;
    for (int k = 1; k <= 2; ++k)
    {
      set_degree(exact, k);
      set_degree(discrete, k);
      const ConvergenceReport a = run_study(exact).at(0);
      const ConvergenceReport b = run_study(discrete).at(0);
      for (Norm n : {Norm::L2, Norm::H1seminorm})
      {
        const auto &ea = a.column(n, "Omega").errors;
        const auto &eb = b.column(n, "Omega").errors;
        // levels up to reference - 2
        for (std::size_t i = 0; i < ea.size(); ++i)
        {
          CAPTURE(k);
          CAPTURE(i);
          CHECK(std::abs(ea[i] - eb[i]) <= 0.05 * ea[i]);
        }
      }
    }
  }
}
