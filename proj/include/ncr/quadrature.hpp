#pragma once

#include <array>
#include <vector>

#include "ncr/geometry.hpp"

namespace ncr {

/// Rule on a segment [a, b], parametrised by t in [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  /// Integral of g over the segment [a, b].
  template <class F>
  auto integrate(const Vec2& a, const Vec2& b, F&& g) const {
    const double len = norm(b - a);
    using R = decltype(g(a));
    R sum{};
    for (std::size_t q = 0; q < points.size(); ++q)
      sum += (weights[q] * len) * g(a + points[q] * (b - a));
    return sum;
  }
};

/// Rule on a triangle in barycentric coordinates; weights sum to 1 and are
/// multiplied by the triangle area on application.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  static Vec2 map(const std::array<Vec2, 3>& t, const std::array<double, 3>& l) {
    return l[0] * t[0] + l[1] * t[1] + l[2] * t[2];
  }
};

const LineRule& gauss_line_2();  // degree 3
const LineRule& gauss_line_3();  // degree 5
const TriangleRule& triangle_degree2();  // edge midpoints
const TriangleRule& triangle_degree5();  // 7-point rule

}  // namespace ncr
