#include "ncr/macro_element.hpp"

#include <algorithm>
#include <unordered_map>

#include "ncr/error.hpp"

namespace ncr {

Quadrangle make_quadrangle(const Vec2& s0, const Vec2& m_i, const Vec2& g_i, const Vec2& m_ip1) {
  Quadrangle q;
  q.corners = {s0, m_i, g_i, m_ip1};
  double a2 = 0.0;
  Vec2 c{};
  // relative to s0 to avoid cancellation far from the origin
  for (int k = 0; k < 4; ++k) {
    const Vec2 p = q.corners[k] - s0;
    const Vec2 r = q.corners[(k + 1) % 4] - s0;
    const double w = cross(p, r);
    a2 += w;
    c += w * (p + r);
  }
  q.area = 0.5 * a2;
  q.centroid = s0 + (1.0 / (3.0 * a2)) * c;
  return q;
}

namespace {

Index edge_between(const Triangulation& tri, Index j, Index other) {
  for (Index f : tri.vertex_facets(j)) {
    const auto& fv = tri.facet(f);
    if (fv[0] == other || fv[1] == other) return f;
  }
  throw MeshError("no edge between vertices " + std::to_string(j) + " and " +
                  std::to_string(other));
}

}  // namespace

MacroElement macro_element(const Triangulation& tri, Index j) {
  if (j < 0 || static_cast<std::size_t>(j) >= tri.num_vertices())
    throw InvalidArgument("vertex index out of range: " + std::to_string(j));

  struct Corner {
    Index cell;
    int k;  // local position of j
    Index a, b;
  };
  const auto& incident = tri.vertex_cells(j);
  if (incident.empty()) throw MeshError("vertex " + std::to_string(j) + " has no cells");

  std::unordered_map<Index, Corner> by_start;
  for (Index c : incident) {
    const int k = tri.local_vertex(c, j);
    const auto& cv = tri.cell(c);
    Corner corner{c, k, cv[(k + 1) % 3], cv[(k + 2) % 3]};
    if (!by_start.emplace(corner.a, corner).second)
      throw MeshError("non-manifold fan around vertex " + std::to_string(j));
  }

  MacroElement m;
  m.center = j;
  m.is_boundary = tri.vertex_on_boundary(j);

  Index start = -1;
  if (m.is_boundary) {
    for (const auto& [a, corner] : by_start) {
      if (!tri.facet_on_boundary(edge_between(tri, j, a))) continue;
      if (start >= 0)
        throw MeshError("non-manifold boundary fan around vertex " + std::to_string(j));
      start = a;
    }
  } else {
    Index best = -1;
    for (const auto& [a, corner] : by_start) {
      const Index f = edge_between(tri, j, a);
      if (best < 0 || f < best) {
        best = f;
        start = a;
      }
    }
  }
  if (start < 0) throw MeshError("cannot locate fan start around vertex " + std::to_string(j));

  const Vec2& s0 = tri.vertex(j);
  Index current = start;
  for (std::size_t step = 0; step < incident.size(); ++step) {
    auto it = by_start.find(current);
    if (it == by_start.end())
      throw MeshError("fan around vertex " + std::to_string(j) + " is not connected");
    const Corner& corner = it->second;
    m.cells.push_back(corner.cell);
    m.rim.push_back(corner.a);
    m.edges.push_back(edge_between(tri, j, corner.a));
    m.midpoints.push_back(0.5 * (s0 + tri.vertex(corner.a)));
    m.normal_first.push_back(tri.cell_normal(corner.cell, (corner.k + 2) % 3));
    m.normal_second.push_back(tri.cell_normal(corner.cell, (corner.k + 1) % 3));
    m.normal_opposite.push_back(tri.cell_normal(corner.cell, corner.k));
    m.cell_areas.push_back(tri.cell_area(corner.cell));
    current = corner.b;
  }

  if (m.is_boundary) {
    const Index last = edge_between(tri, j, current);
    if (!tri.facet_on_boundary(last))
      throw MeshError("boundary fan around vertex " + std::to_string(j) +
                      " does not end on the boundary");
    m.rim.push_back(current);
    m.edges.push_back(last);
    m.midpoints.push_back(0.5 * (s0 + tri.vertex(current)));
  } else if (current != start) {
    throw MeshError("interior fan around vertex " + std::to_string(j) + " does not close");
  }

  m.quads.reserve(m.cells.size());
  for (std::size_t i = 0; i < m.cells.size(); ++i)
    m.quads.push_back(make_quadrangle(s0, m.midpoints[i], tri.cell_centroid(m.cells[i]),
                                      m.midpoints[m.next_edge(i)]));
  return m;
}

}  // namespace ncr
