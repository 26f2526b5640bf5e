#include "support.hpp"

#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

using namespace measfem;
using namespace testing;

namespace
{

double shoelace_hexagon()
{
  const auto v = hexagon_vertices();
  double a = 0.0;
  for (int i = 0; i < 6; ++i)
    a += v[i][0] * v[(i + 1) % 6][1] - v[(i + 1) % 6][0] * v[i][1];
  return 0.5 * std::abs(a);
}

std::set<std::pair<Index, Index>> edge_set(const SimplicialMesh &m)
{
  std::set<std::pair<Index, Index>> edges;
  for (const Cell &c : m.cells)
    for (int a = 0; a <= m.dim; ++a)
      for (int b = a + 1; b <= m.dim; ++b)
        edges.insert({std::min(c[a], c[b]), std::max(c[a], c[b])});
  return edges;
}

} // namespace

TEST_SUITE("mesh")
{
  TEST_CASE("lshape generator counts")
  {
    const SimplicialMesh m4 = generate_lshape(4);
    CHECK(m4.n_vertices() == 65);
    CHECK(m4.n_cells() == 96);
    const SimplicialMesh m1 = generate_lshape(1);
    CHECK(m1.n_vertices() == 8);
    CHECK(m1.n_cells() == 6);
    const SimplicialMesh r = refine_uniform(m4);
    CHECK(r.n_cells() == 384);
    CHECK(r.n_vertices() == 225);
    CHECK(r.level == 1);
  }

  TEST_CASE("lshape keeps the notch empty")
  {
    const SimplicialMesh m = generate_lshape(3);
    for (Index c = 0; c < m.n_cells(); ++c)
    {
      Point g{0, 0, 0};
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 2; ++k)
          g[k] += m.vertices[m.cells[c][i]][k] / 3.0;
      CHECK_FALSE((g[0] > 0.0 && g[1] < 0.0));
    }
  }

  TEST_CASE("hexagon generator")
  {
    const SimplicialMesh h0 = generate_hexagon(0);
    CHECK(h0.n_vertices() == 7);
    CHECK(h0.n_cells() == 6);
    CHECK(generate_hexagon(1).n_cells() == 24);
    CHECK(hexagon_vertices()[5][0] == doctest::Approx(-0.67735).epsilon(1e-5));
    CHECK(hexagon_vertices()[5][0] == -1.0 / std::sqrt(3.0) - 0.1);
    CHECK(generate_hexagon(2).level == 0);
    CHECK(generate_hexagon(2).parent_of_cell.empty());
  }

  TEST_CASE("cube generator")
  {
    const SimplicialMesh c2 = generate_cube(2);
    CHECK(c2.n_vertices() == 27);
    CHECK(c2.n_cells() == 48);
    const SimplicialMesh c1 = generate_cube(1);
    CHECK(c1.n_vertices() == 8);
    CHECK(c1.n_cells() == 6);
    CHECK(refine_uniform(c2).n_cells() == 384);
  }

  TEST_CASE("generators reject bad sizes")
  {
    CHECK_THROWS_AS(generate_lshape(0), MeshError);
    CHECK_THROWS_AS(generate_cube(0), MeshError);
    CHECK_THROWS_AS(generate_hexagon(-1), MeshError);
  }

  TEST_CASE("volume conservation and conformity over four levels")
  {
    struct Case
    {
      const char *name;
      SimplicialMesh mesh;
      double volume;
    };
    std::vector<Case> cases{{"lshape", generate_lshape(1), 3.0},
                            {"hexagon", generate_hexagon(0), shoelace_hexagon()},
                            {"cube", generate_cube(1), 1.0}};
    for (Case &c : cases)
    {
      SimplicialMesh m = c.mesh;
      for (int level = 0; level <= 4; ++level)
      {
        CAPTURE(c.name);
        CAPTURE(level);
        CHECK(std::abs(total_volume(m) - c.volume) <= 1e-12 * c.volume);
        for (Index k = 0; k < m.n_cells(); ++k)
          REQUIRE(signed_volume(m, k) > 0.0);
        const FacetCensus census = facet_census(m);
        CHECK(census.overloaded == 0);
        CHECK(census.boundary_matches);
        CHECK(census.boundary == m.boundary_facets.size());
        CHECK(is_conforming(m));
        if (level < 4)
          m = refine_uniform(m);
      }
    }
  }

  TEST_CASE("refinement lineage")
  {
    for (SimplicialMesh coarse : {generate_lshape(2), generate_hexagon(1), generate_cube(2)})
    {
      const SimplicialMesh fine = refine_uniform(coarse);
      const int children = coarse.dim == 2 ? 4 : 8;
      REQUIRE(fine.n_cells() == children * coarse.n_cells());
      REQUIRE(fine.parent_of_cell.size() == fine.cells.size());
      for (Index v = 0; v < coarse.n_vertices(); ++v)
        CHECK(fine.vertices[v] == coarse.vertices[v]);

      std::vector<double> child_volume(coarse.n_cells(), 0.0);
      std::vector<int> child_count(coarse.n_cells(), 0);
      for (Index c = 0; c < fine.n_cells(); ++c)
      {
        child_volume[fine.parent_of_cell[c]] += signed_volume(fine, c);
        child_count[fine.parent_of_cell[c]] += 1;
      }
      for (Index p = 0; p < coarse.n_cells(); ++p)
      {
        CHECK(child_count[p] == children);
        CHECK(child_volume[p] == doctest::Approx(signed_volume(coarse, p)).epsilon(1e-13));
      }
      // Children lie inside their parent.
      for (Index c = 0; c < fine.n_cells(); ++c)
        for (int i = 0; i <= fine.dim; ++i)
        {
          const Bary b = barycentric(coarse, fine.parent_of_cell[c], fine.vertices[fine.cells[c][i]]);
          for (int j = 0; j <= fine.dim; ++j)
            CHECK(b[j] >= -1e-12);
        }
    }
  }

  TEST_CASE("nestedness: fine vertices are coarse vertices or coarse edge midpoints")
  {
    for (SimplicialMesh coarse : {generate_lshape(2), generate_cube(1)})
    {
      const SimplicialMesh fine = refine_uniform(coarse);
      std::set<Point> midpoints;
      for (auto [a, b] : edge_set(coarse))
      {
        Point m;
        for (int k = 0; k < 3; ++k)
          m[k] = 0.5 * (coarse.vertices[a][k] + coarse.vertices[b][k]);
        midpoints.insert(m);
      }
      CHECK(fine.n_vertices() == coarse.n_vertices() + static_cast<Index>(edge_set(coarse).size()));
      for (Index v = coarse.n_vertices(); v < fine.n_vertices(); ++v)
        CHECK(midpoints.count(fine.vertices[v]) == 1);
    }
  }

  TEST_CASE("mesh size halves under red refinement")
  {
    for (SimplicialMesh m : {generate_lshape(1), generate_hexagon(0), generate_cube(1)})
    {
      double h = mesh_size(m);
      for (int l = 0; l < 3; ++l)
      {
        m = refine_uniform(m);
        CHECK(mesh_size(m) == doctest::Approx(h / 2).epsilon(1e-13));
        h = mesh_size(m);
      }
    }
  }

  TEST_CASE("3D refinement stays shape regular")
  {
    // diameter^3 / volume must not degrade across levels.
    SimplicialMesh m = generate_cube(1);
    double worst0 = 0.0;
    for (Index c = 0; c < m.n_cells(); ++c)
      worst0 = std::max(worst0, std::pow(cell_diameter(m, c), 3) / signed_volume(m, c));
    for (int l = 0; l < 3; ++l)
      m = refine_uniform(m);
    double worst = 0.0;
    for (Index c = 0; c < m.n_cells(); ++c)
      worst = std::max(worst, std::pow(cell_diameter(m, c), 3) / signed_volume(m, c));
    CHECK(worst <= 2.0 * worst0);
  }

  TEST_CASE("octahedron split uses the shortest diagonal")
  {
    SimplicialMesh tet = reference_simplex(3);
    tet.vertices = {{0.0, 0.0, 0.0}, {1.3, 0.1, 0.0}, {0.2, 0.9, 0.1}, {0.1, 0.3, 0.7}};
    normalize_orientation(tet);
    const SimplicialMesh fine = refine_uniform(tet);
    // Interior edges join midpoints of opposite coarse edges; their midpoint is the centroid.
    std::vector<double> interior;
    for (auto [a, b] : edge_set(fine))
    {
      const Point &p = fine.vertices[a], &q = fine.vertices[b];
      const Point mid{(p[0] + q[0]) / 2, (p[1] + q[1]) / 2, (p[2] + q[2]) / 2};
      const Bary lam = barycentric(tet, 0, mid);
      if (std::all_of(lam.begin(), lam.end(), [](double x) { return std::abs(x - 0.25) < 1e-12; }))
        interior.push_back(distance(p, q));
    }
    REQUIRE(interior.size() == 1);
    const auto &v = tet.vertices;
    auto mid = [&](int a, int b) {
      return Point{(v[a][0] + v[b][0]) / 2, (v[a][1] + v[b][1]) / 2, (v[a][2] + v[b][2]) / 2};
    };
    const double d0 = distance(mid(0, 1), mid(2, 3));
    const double d1 = distance(mid(0, 2), mid(1, 3));
    const double d2 = distance(mid(0, 3), mid(1, 2));
    REQUIRE(std::max({d0, d1, d2}) - std::min({d0, d1, d2}) > 0.05);
    CHECK(interior[0] == doctest::Approx(std::min({d0, d1, d2})).epsilon(1e-14));
  }

  TEST_CASE("point location basics")
  {
    for (SimplicialMesh m : {generate_lshape(2), generate_cube(2)})
    {
      const Cell &c0 = m.cells[0];
      for (int i = 0; i <= m.dim; ++i)
      {
        const auto loc = locate_point(m, m.vertices[c0[i]]);
        REQUIRE(loc);
        CHECK(loc->cell == 0);
        for (int j = 0; j <= m.dim; ++j)
          CHECK(loc->bary[j] == doctest::Approx(i == j ? 1.0 : 0.0));
      }
      for (Index c = 0; c < m.n_cells(); c += 7)
      {
        Point g{0, 0, 0};
        for (int i = 0; i <= m.dim; ++i)
          for (int k = 0; k < 3; ++k)
            g[k] += m.vertices[m.cells[c][i]][k] / (m.dim + 1);
        const auto loc = locate_point(m, g);
        REQUIRE(loc);
        CHECK(loc->cell == c);
        for (int j = 0; j <= m.dim; ++j)
          CHECK(loc->bary[j] == doctest::Approx(1.0 / (m.dim + 1)).epsilon(1e-12));
      }
      CHECK_FALSE(locate_point(m, {5.0, 5.0, 5.0}));
      CHECK_FALSE(PointLocator(m).locate({5.0, 5.0, 5.0}));
    }
    // Inside the bounding box but in the L-shape notch.
    CHECK_FALSE(locate_point(generate_lshape(2), {0.5, -0.5, 0.0}));
  }

  TEST_CASE("locate then reconstruct round trip")
  {
    const SimplicialMesh m = refined(generate_hexagon(0), 2);
    const PointLocator loc(m);
    int found = 0;
    for (int i = 0; i < 500; ++i)
    {
      const Point x{uniform(-1.3, 1.3), uniform(-1.1, 1.1), 0.0};
      const auto a = locate_point(m, x);
      const auto b = loc.locate(x);
      REQUIRE(a.has_value() == b.has_value());
      if (!a)
        continue;
      ++found;
      CHECK(a->cell == b->cell);
      CHECK(distance(from_barycentric(m, a->cell, a->bary), x) <= 1e-12);
    }
    CHECK(found > 100);
  }

  TEST_CASE("locator agrees with brute force on shared vertices and facets")
  {
    for (SimplicialMesh m : {refined(generate_lshape(1), 2), refined(generate_cube(1), 1)})
    {
      const PointLocator loc(m);
      std::vector<Point> probes(m.vertices.begin(), m.vertices.end());
      for (auto [a, b] : edge_set(m))
        probes.push_back({(m.vertices[a][0] + m.vertices[b][0]) / 2, (m.vertices[a][1] + m.vertices[b][1]) / 2,
                          (m.vertices[a][2] + m.vertices[b][2]) / 2});
      for (const Point &x : probes)
      {
        const auto a = locate_point(m, x);
        const auto b = loc.locate(x);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(a->cell == b->cell);
        // Lowest index among all cells containing x.
        Index lowest = -1;
        for (Index c = 0; c < m.n_cells() && lowest < 0; ++c)
        {
          const Bary lam = barycentric(m, c, x);
          bool inside = true;
          for (int i = 0; i <= m.dim; ++i)
            inside = inside && lam[i] >= -tol_geom;
          if (inside)
            lowest = c;
        }
        CHECK(a->cell == lowest);
      }
    }
  }

  TEST_CASE("distance to boundary")
  {
    const SimplicialMesh sq = generate_unit_square(2);
    const PointLocator loc(sq);
    CHECK(loc.near_boundary({0.5, 1e-9, 0.0}, 1e-8));
    CHECK_FALSE(loc.near_boundary({0.5, 0.5, 0.0}, 1e-8));
    CHECK(loc.distance_to_boundary_upto({0.5, 0.1, 0.0}, 1.0) == doctest::Approx(0.1));
    const SimplicialMesh cube = generate_cube(2);
    const PointLocator cl(cube);
    CHECK(cl.distance_to_boundary_upto({0.3, 0.5, 0.5}, 1.0) == doctest::Approx(0.3));
    CHECK(cl.near_boundary({0.5, 0.5, 1.0 - 1e-9}, 1e-8));
  }

  TEST_CASE("region predicates are strict")
  {
    const RegionPredicate ball = RegionPredicate::ball_at({0, 0, 0}, 1.0);
    const RegionPredicate out = RegionPredicate::outside_ball({0, 0, 0}, 1.0);
    CHECK(ball.contains({0.5, 0, 0}));
    CHECK_FALSE(ball.contains({1.0, 0, 0}));
    CHECK_FALSE(out.contains({1.0, 0, 0}));
    CHECK(out.contains({1.5, 0, 0}));
    CHECK(RegionPredicate::whole().contains({100, 0, 0}));
    CHECK(region_kind_from_string(to_string(RegionPredicate::Kind::ball_complement)) ==
          RegionPredicate::Kind::ball_complement);
  }

  TEST_CASE("select_cells")
  {
    const SimplicialMesh m = refined(generate_lshape(4), 1);
    CHECK(select_cells(m, RegionPredicate::whole()).size() == m.cells.size());
    CHECK(select_cells(m, RegionPredicate::ball_at({-0.5, 0.5, 0}, 0.0)).empty());

    const RegionPredicate out = RegionPredicate::outside_ball({-0.5, 0.5, 0.0}, 1.0 / 6.0);
    double previous_fraction = 0.0;
    SimplicialMesh level = m;
    for (int l = 0; l < 3; ++l)
    {
      const auto sel = select_cells(level, out);
      std::size_t brute = 0;
      for (const Cell &c : level.cells)
      {
        bool all = true;
        for (int i = 0; i < 3; ++i)
          all = all && distance(level.vertices[c[i]], {-0.5, 0.5, 0.0}) > 1.0 / 6.0;
        brute += all;
      }
      CHECK(sel.size() == brute);
      CHECK(sel.size() < level.cells.size());
      const double fraction = double(sel.size()) / level.cells.size();
      CHECK(fraction > previous_fraction);
      previous_fraction = fraction;
      level = refine_uniform(level);
    }
  }

  TEST_CASE("mesh text format round trip")
  {
    for (SimplicialMesh m : {refined(generate_hexagon(0), 1), generate_cube(2)})
    {
      std::stringstream s;
      write_mesh(m, s);
      std::string header;
      std::getline(s, header);
      CHECK(header == std::to_string(m.dim) + " " + std::to_string(m.n_vertices()) + " " +
                          std::to_string(m.n_cells()) + " " + std::to_string(m.boundary_facets.size()));
      s.seekg(0);
      const SimplicialMesh r = read_mesh(s);
      CHECK(r.dim == m.dim);
      CHECK(r.vertices == m.vertices);
      CHECK(r.cells == m.cells);
      CHECK(r.boundary_facets.size() == m.boundary_facets.size());
    }
    std::stringstream bad("2 3 1");
    CHECK_THROWS_AS(read_mesh(bad), MeshError);
  }
}
