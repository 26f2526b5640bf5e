#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace measfem
{

using Index = std::int32_t;

/// Coordinates are always stored with three components; 2D meshes keep z = 0.
using Point = std::array<double, 3>;

/// Vertex indices of a simplex. Only the first dim + 1 entries are meaningful.
using Cell = std::array<Index, 4>;

/// Vertex indices of a boundary facet. Only the first dim entries are meaningful.
using Facet = std::array<Index, 3>;

/// Barycentric coordinates, dim + 1 meaningful entries.
using Bary = std::array<double, 4>;

class MeshError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * Conforming simplicial triangulation in 2D or 3D.
 *
 * Cells are positively oriented. After refinement every coarse vertex keeps
 * its index and parent_of_cell maps each cell to the cell it was cut from.
 */
struct SimplicialMesh
{
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<Facet> boundary_facets;
  int level = 0;
  std::vector<Index> parent_of_cell; // empty iff level == 0

  Index n_vertices() const { return static_cast<Index>(vertices.size()); }
  Index n_cells() const { return static_cast<Index>(cells.size()); }
  int vertices_per_cell() const { return dim + 1; }
};

double signed_volume(const SimplicialMesh &mesh, Index cell);
double total_volume(const SimplicialMesh &mesh);
double cell_diameter(const SimplicialMesh &mesh, Index cell);

/// Maximum cell diameter.
double mesh_size(const SimplicialMesh &mesh);

/// Flips cells with negative signed volume; throws on degenerate cells.
void normalize_orientation(SimplicialMesh &mesh);

/// Recomputes boundary_facets as the facets owned by a single cell.
void extract_boundary_facets(SimplicialMesh &mesh);

struct FacetCensus
{
  std::size_t boundary = 0;      // facets with one incident cell
  std::size_t interior = 0;      // facets with two incident cells
  std::size_t overloaded = 0;    // facets with three or more cells
  bool boundary_matches = false; // single-cell facets == declared boundary_facets
};

FacetCensus facet_census(const SimplicialMesh &mesh);
bool is_conforming(const SimplicialMesh &mesh);

// Generators ---------------------------------------------------------------

/// (-1,1)^2 minus [0,1)x(-1,0], n squares per unit edge, LL-UR diagonals.
SimplicialMesh generate_lshape(int n);

/// (0,1)^2 with n squares per edge, LL-UR diagonals.
SimplicialMesh generate_unit_square(int n);

/// Corners V1..V6 of the hexagon domain, in order.
std::array<Point, 6> hexagon_vertices();

/// Centroid fan of the hexagon, red-refined fan_subdivisions times. The
/// result is a level-0 mesh.
SimplicialMesh generate_hexagon(int fan_subdivisions);

/// (0,1)^3 with n^3 subcubes, six Kuhn tetrahedra per subcube.
SimplicialMesh generate_cube(int n);

/// Red refinement (4 children in 2D, 8 in 3D with shortest interior diagonal).
SimplicialMesh refine_uniform(const SimplicialMesh &mesh);

// Point location -----------------------------------------------------------

inline constexpr double tol_geom = 1e-10;

struct Location
{
  Index cell = -1;
  Bary bary{};
};

/// Unclamped barycentric coordinates of x with respect to a cell.
Bary barycentric(const SimplicialMesh &mesh, Index cell, const Point &x);

/// Point of the cell with the given barycentric coordinates.
Point from_barycentric(const SimplicialMesh &mesh, Index cell, const Bary &bary);

/// Brute-force location; lowest cell index wins on shared facets.
std::optional<Location> locate_point(const SimplicialMesh &mesh, const Point &x);

/**
 * Bucket-grid accelerated point location with the same results as
 * locate_point. Also answers "is x within eps of the boundary".
 */
class PointLocator
{
public:
  explicit PointLocator(const SimplicialMesh &mesh);

  std::optional<Location> locate(const Point &x) const;
  bool near_boundary(const Point &x, double eps) const;
  double distance_to_boundary_upto(const Point &x, double eps) const;

private:
  struct Grid
  {
    Point lo{}, hi{};
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> inv_width{};
    std::vector<Index> offsets;
    std::vector<Index> items;
  };

  void build_grid(Grid &grid, const std::vector<std::array<Point, 2>> &boxes, std::size_t target) const;
  std::array<int, 3> bucket_of(const Grid &grid, const Point &x) const;

  const SimplicialMesh *mesh_;
  Grid cells_;
  Grid facets_;
};

// Regions -------------------------------------------------------------------

struct RegionPredicate
{
  enum class Kind
  {
    whole_domain,
    ball,
    ball_complement
  };

  Kind kind = Kind::whole_domain;
  Point center{};
  double radius = 0.0;

  static RegionPredicate whole() { return {}; }
  static RegionPredicate ball_at(const Point &c, double r) { return {Kind::ball, c, r}; }
  static RegionPredicate outside_ball(const Point &c, double r) { return {Kind::ball_complement, c, r}; }

  bool contains(const Point &x) const;
};

std::string to_string(RegionPredicate::Kind kind);
RegionPredicate::Kind region_kind_from_string(const std::string &name);

/// Cells whose vertices all satisfy the predicate.
std::vector<Index> select_cells(const SimplicialMesh &mesh, const RegionPredicate &region);

// Text format ---------------------------------------------------------------

void write_mesh(const SimplicialMesh &mesh, std::ostream &out);
SimplicialMesh read_mesh(std::istream &in);

} // namespace measfem
