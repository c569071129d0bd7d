#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ncr/geometry.hpp"

namespace ncr {

using Index = std::int32_t;
inline constexpr Index kNoCell = -1;

/// Simplicial 2D triangulation with derived connectivity and geometry.
///
/// Cells are stored counterclockwise. Local vertex k of a cell is opposite
/// local facet k, so `cell_facets(c)[k]` is the facet F_{k,c} and
/// `cell_normal(c, k)` is its outward normal scaled by the facet length.
/// Instances are immutable once built; use build_connectivity() or one of the
/// generators.
class Triangulation {
public:
  Triangulation() = default;

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_facets() const { return facets_.size(); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<Index, 3>>& cells() const { return cells_; }
  const std::vector<std::array<Index, 2>>& facets() const { return facets_; }

  const Vec2& vertex(Index v) const { return vertices_[v]; }
  const std::array<Index, 3>& cell(Index c) const { return cells_[c]; }
  const std::array<Index, 2>& facet(Index f) const { return facets_[f]; }

  /// One or two incident cells; the canonical normal points out of the first.
  /// The second entry is kNoCell on boundary facets.
  const std::array<Index, 2>& facet_cells(Index f) const { return facet_cells_[f]; }
  const std::array<Index, 3>& cell_facets(Index c) const { return cell_facets_[c]; }

  bool facet_on_boundary(Index f) const { return facet_boundary_[f] != 0; }
  bool vertex_on_boundary(Index v) const { return vertex_boundary_[v] != 0; }

  const std::vector<Index>& vertex_cells(Index v) const { return vertex_cells_[v]; }
  const std::vector<Index>& vertex_vertices(Index v) const { return vertex_vertices_[v]; }
  const std::vector<Index>& vertex_facets(Index v) const { return vertex_facets_[v]; }

  double cell_area(Index c) const { return cell_area_[c]; }
  const Vec2& cell_centroid(Index c) const { return cell_centroid_[c]; }
  double facet_length(Index f) const { return facet_length_[f]; }
  const Vec2& facet_midpoint(Index f) const { return facet_midpoint_[f]; }
  /// Unit canonical normal n_f.
  const Vec2& facet_normal(Index f) const { return facet_normal_[f]; }
  /// Outward normal of the facet opposite local vertex k, with |S| = facet length.
  const Vec2& cell_normal(Index c, int k) const { return cell_normals_[c][k]; }
  /// Local position (0..2) of facet f inside cell c, or -1.
  int local_facet(Index c, Index f) const;
  /// Local position (0..2) of vertex v inside cell c, or -1.
  int local_vertex(Index c, Index v) const;

  /// Barycentric coordinates of x with respect to cell c.
  std::array<double, 3> barycentric(Index c, const Vec2& x) const;

  /// Reported mesh step: sqrt(2|Omega| / #cells). Equals 1/n on the n x n grids.
  double mesh_size() const { return mesh_size_; }
  /// Largest cell diameter.
  double diameter() const { return diameter_; }
  double domain_area() const { return domain_area_; }

  std::size_t num_boundary_facets() const { return num_boundary_facets_; }

  friend Triangulation build_connectivity(std::vector<Vec2> vertices,
                                          std::vector<std::array<Index, 3>> cells);

private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<Index, 3>> cells_;
  std::vector<std::array<Index, 2>> facets_;
  std::vector<std::array<Index, 2>> facet_cells_;
  std::vector<std::array<Index, 3>> cell_facets_;
  std::vector<std::uint8_t> facet_boundary_;
  std::vector<std::uint8_t> vertex_boundary_;
  std::vector<std::vector<Index>> vertex_cells_;
  std::vector<std::vector<Index>> vertex_vertices_;
  std::vector<std::vector<Index>> vertex_facets_;

  std::vector<double> cell_area_;
  std::vector<Vec2> cell_centroid_;
  std::vector<double> facet_length_;
  std::vector<Vec2> facet_midpoint_;
  std::vector<Vec2> facet_normal_;
  std::vector<std::array<Vec2, 3>> cell_normals_;
  double mesh_size_ = 0.0;
  double diameter_ = 0.0;
  double domain_area_ = 0.0;
  std::size_t num_boundary_facets_ = 0;
};

/// Builds facets, adjacency, boundary flags and the geometry cache.
/// Clockwise cells are reoriented. Throws MeshError on degenerate cells,
/// duplicate cells, invalid indices, or facets shared by three or more cells.
Triangulation build_connectivity(std::vector<Vec2> vertices,
                                 std::vector<std::array<Index, 3>> cells);

enum class DiagonalMode { Uniform, Alternating };

/// n x n grid of the unit square, each square split into two triangles.
/// Uniform: every square is cut along its (lower-left, upper-right) diagonal.
/// Alternating: the cut flips with the parity of the square, and corner
/// squares are always cut through the domain corner so that no triangle has
/// two boundary edges.
Triangulation generate_structured(int n, DiagonalMode mode = DiagonalMode::Alternating);

/// Kershaw-type distorted grid: vertex (i, j) is moved vertically by
/// distortion * a(x) * b(y) where a is a zigzag over the four vertical strips
/// and b(y) = 2y(1-y). Quadrilaterals are cut lower-left to upper-right.
/// distortion = 0 reproduces generate_structured(n, Uniform).
Triangulation generate_kershaw(int n, double distortion);

/// Swaps the interior edge of every triangle that has two boundary edges with
/// the neighbour across that interior edge. Returns the number of swaps.
/// The result satisfies the "at most one boundary edge per triangle" rule
/// for grids whose corner squares are convex.
Triangulation repair_boundary_corners(const Triangulation& tri, int* swaps = nullptr);

struct ValidationReport {
  bool orientation_ok = true;
  bool euler_ok = true;
  bool manifold_ok = true;
  bool normals_ok = true;
  long euler_characteristic = 0;
  /// Cells with two or more boundary edges.
  std::vector<Index> hypothesis_41_violations;

  bool hypothesis_41() const { return hypothesis_41_violations.empty(); }
  bool structural_ok() const { return orientation_ok && euler_ok && manifold_ok && normals_ok; }
};

ValidationReport validate(const Triangulation& tri);

/// Line-oriented text format: "ncr-mesh 1", counts, vertices, cells.
void write_mesh(const Triangulation& tri, const std::filesystem::path& path);
void write_mesh(const Triangulation& tri, std::ostream& out);
Triangulation read_mesh(const std::filesystem::path& path);
Triangulation read_mesh(std::istream& in);

}  // namespace ncr
