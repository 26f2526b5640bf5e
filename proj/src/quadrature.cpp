#include "measfem/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace measfem
{

namespace
{

enum class Orbit
{
  s3,   // centroid (2D)
  s21,  // (a, a, 1-2a)
  s111, // (a, b, 1-a-b)
  s4,   // centroid (3D)
  s31,  // (a, a, a, 1-3a)
  s22,  // (a, a, 1/2-a, 1/2-a)
  s211  // (a, a, b, 1-2a-b)
};

struct OrbitEntry
{
  Orbit orbit;
  double a, b, weight;
};

void add_orbit(QuadratureRule &rule, const OrbitEntry &e)
{
  std::array<double, 4> base{};
  const int n = rule.dim + 1;
  switch (e.orbit)
  {
  case Orbit::s3:
    base = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0};
    break;
  case Orbit::s21:
    base = {e.a, e.a, 1.0 - 2.0 * e.a, 0.0};
    break;
  case Orbit::s111:
    base = {e.a, e.b, 1.0 - e.a - e.b, 0.0};
    break;
  case Orbit::s4:
    base = {0.25, 0.25, 0.25, 0.25};
    break;
  case Orbit::s31:
    base = {e.a, e.a, e.a, 1.0 - 3.0 * e.a};
    break;
  case Orbit::s22:
    base = {e.a, e.a, 0.5 - e.a, 0.5 - e.a};
    break;
  case Orbit::s211:
    base = {e.a, e.a, e.b, 1.0 - 2.0 * e.a - e.b};
    break;
  }

  // All distinct permutations of the first n entries.
  std::array<int, 4> perm{0, 1, 2, 3};
  std::vector<Bary> seen;
  do
  {
    Bary p{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i)
      p[i] = base[perm[i]];
    if (std::find(seen.begin(), seen.end(), p) == seen.end())
      seen.push_back(p);
  } while (std::next_permutation(perm.begin(), perm.begin() + n));

  for (const Bary &p : seen)
  {
    rule.points.push_back(p);
    rule.weights.push_back(e.weight);
  }
}

QuadratureRule make_rule(int dim, int degree, std::initializer_list<OrbitEntry> orbits)
{
  QuadratureRule rule;
  rule.dim = dim;
  rule.exact_degree = degree;
  for (const OrbitEntry &e : orbits)
    add_orbit(rule, e);
  return rule;
}

// Orbit parameters: Dunavant (triangle) and Keast (tetrahedron) point sets,
// polished to double precision against the monomial moment equations.
const std::array<QuadratureRule, 5> &triangle_rules()
{
  static const std::array<QuadratureRule, 5> rules{
      make_rule(2, 1, {{Orbit::s3, 0, 0, 1.0}}),
      make_rule(2, 2, {{Orbit::s21, 1.0 / 6.0, 0, 1.0 / 3.0}}),
      make_rule(2, 4,
                {{Orbit::s21, 0.445948490915964886318, 0, 0.223381589678011465695},
                 {Orbit::s21, 0.0915762135097707434596, 0, 0.109951743655321867638}}),
      make_rule(2, 5,
                {{Orbit::s3, 0, 0, 0.225},
                 {Orbit::s21, 0.47014206410511508977, 0, 0.132394152788506180738},
                 {Orbit::s21, 0.101286507323456338801, 0, 0.125939180544827152596}}),
      make_rule(2, 6,
                {{Orbit::s21, 0.0630890144915022283403, 0, 0.0508449063702068169209},
                 {Orbit::s21, 0.249286745170910421292, 0, 0.116786275726379366025},
                 {Orbit::s111, 0.0531450498448169473532, 0.310352451033784405417, 0.0828510756183735751936}}),
  };
  return rules;
}

const std::array<QuadratureRule, 4> &tetrahedron_rules()
{
  static const std::array<QuadratureRule, 4> rules{
      make_rule(3, 1, {{Orbit::s4, 0, 0, 1.0}}),
      make_rule(3, 2, {{Orbit::s31, 0.13819660112501051518, 0, 0.25}}),
      make_rule(3, 5,
                {{Orbit::s31, 0.0927352503108912264023, 0, 0.0734930431163619495437},
                 {Orbit::s31, 0.310885919263300609797, 0, 0.112687925718015850799},
                 {Orbit::s22, 0.0455037041256496494919, 0, 0.0425460207770814664381}}),
      make_rule(3, 6,
                {{Orbit::s31, 0.214602871259152029289, 0, 0.0399227502581674920997},
                 {Orbit::s31, 0.0406739585346113531156, 0, 0.010077211055320642948},
                 {Orbit::s31, 0.322337890142275510344, 0, 0.0553571815436547220952},
                 {Orbit::s211, 0.0636610018750175252992, 0.269672331458315808034, 0.0482142857142857142857}}),
  };
  return rules;
}

} // namespace

const QuadratureRule &quadrature_for(int dim, int exact_degree)
{
  if (exact_degree > 6)
    throw std::invalid_argument("quadrature_for: exactness " + std::to_string(exact_degree) + " > 6 unsupported");
  exact_degree = std::max(exact_degree, 1);
  if (dim == 2)
  {
    for (const QuadratureRule &r : triangle_rules())
      if (r.exact_degree >= exact_degree)
        return r;
  }
  else if (dim == 3)
  {
    for (const QuadratureRule &r : tetrahedron_rules())
      if (r.exact_degree >= exact_degree)
        return r;
  }
  throw std::invalid_argument("quadrature_for: dim must be 2 or 3");
}

const GaussRule1D &gauss_legendre_01(int n_points)
{
  static const std::array<GaussRule1D, 4> rules = [] {
    std::array<GaussRule1D, 4> out;
    for (int n = 1; n <= 4; ++n)
    {
      // Newton iteration on P_n from the Chebyshev-like initial guess.
      GaussRule1D &g = out[n - 1];
      for (int i = 0; i < n; ++i)
      {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it)
        {
          double p0 = 1.0, p1 = x;
          for (int k = 2; k <= n; ++k)
          {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (x * p1 - p0) / (x * x - 1.0);
          const double dx = p1 / dp;
          x -= dx;
          if (std::abs(dx) < 1e-16)
            break;
        }
        g.points.push_back(0.5 * (1.0 - x));
        g.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
      }
    }
    return out;
  }();
  if (n_points < 1 || n_points > 4)
    throw std::invalid_argument("gauss_legendre_01: 1..4 points supported");
  return rules[n_points - 1];
}

} // namespace measfem
