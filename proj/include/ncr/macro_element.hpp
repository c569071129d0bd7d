#pragma once

#include <array>
#include <vector>

#include "ncr/mesh.hpp"

namespace ncr {

struct Quadrangle {
  /// S_0, M_i, G_i, M_{i+1}
  std::array<Vec2, 4> corners;
  double area = 0.0;
  Vec2 centroid;
};

/// Patch of cells around one vertex S_0.
///
/// Fan position i (0-based) holds the cell K_i = (S_0, S_i, S_{i+1}),
/// counterclockwise. Edge F_i = S_0 S_i. For interior vertices the fan is
/// cyclic and there are as many edges as cells; for boundary vertices the fan
/// starts and ends on a boundary edge and has one more edge than cells.
struct MacroElement {
  Index center = 0;
  bool is_boundary = false;
  std::vector<Index> cells;        // K_i
  std::vector<Index> edges;        // facet index of F_i
  std::vector<Index> rim;          // S_i
  std::vector<Vec2> midpoints;     // M_i
  std::vector<Vec2> normal_first;  // S_{i,i}: outward normal of K_i at F_i
  std::vector<Vec2> normal_second; // S_{i+1,i}: outward normal of K_i at F_{i+1}
  std::vector<Vec2> normal_opposite;  // S_{0,i}: outward normal of K_i at F_{i,0}
  std::vector<double> cell_areas;
  std::vector<Quadrangle> quads;

  std::size_t num_cells() const { return cells.size(); }
  std::size_t num_edges() const { return edges.size(); }
  /// Edge index of the second edge of fan cell i (wraps for interior fans).
  std::size_t next_edge(std::size_t i) const {
    return is_boundary ? i + 1 : (i + 1) % edges.size();
  }
};

/// Extracts the fan around vertex j. Interior fans start at the incident
/// edge with the smallest facet index; boundary fans start at the boundary
/// edge from which the counterclockwise sweep enters the domain.
/// Throws MeshError for non-manifold fans.
MacroElement macro_element(const Triangulation& tri, Index j);

/// Area and centroid of a simple polygon given counterclockwise.
Quadrangle make_quadrangle(const Vec2& s0, const Vec2& m_i, const Vec2& g_i, const Vec2& m_ip1);

}  // namespace ncr
