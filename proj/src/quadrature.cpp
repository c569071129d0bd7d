#include "ncr/quadrature.hpp"

#include <cmath>

namespace ncr {

const LineRule& gauss_line_2() {
  static const LineRule rule = [] {
    const double d = 0.5 / std::sqrt(3.0);
    return LineRule{{0.5 - d, 0.5 + d}, {0.5, 0.5}, 3};
  }();
  return rule;
}

const LineRule& gauss_line_3() {
  static const LineRule rule = [] {
    const double d = 0.5 * std::sqrt(0.6);
    return LineRule{{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}, 5};
  }();
  return rule;
}

const TriangleRule& triangle_degree2() {
  static const TriangleRule rule{
      {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2};
  return rule;
}

const TriangleRule& triangle_degree5() {
  static const TriangleRule rule = [] {
    const double s = std::sqrt(15.0);
    const double a1 = (6.0 - s) / 21.0, b1 = 1.0 - 2.0 * a1;
    const double a2 = (6.0 + s) / 21.0, b2 = 1.0 - 2.0 * a2;
    const double w1 = (155.0 - s) / 1200.0;
    const double w2 = (155.0 + s) / 1200.0;
    TriangleRule r;
    r.degree = 5;
    r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3},
                {a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
    r.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

}  // namespace ncr
