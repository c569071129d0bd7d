#include "ncr/fem.hpp"

#include <cmath>

#include "ncr/error.hpp"

namespace ncr {

std::size_t layout_size(const Triangulation& tri, Layout layout) {
  switch (layout) {
    case Layout::CrScalar: return tri.num_facets();
    case Layout::CrVector: return 2 * tri.num_facets();
    case Layout::P0: return tri.num_cells();
    case Layout::P1: return tri.num_vertices();
    case Layout::P0PlusP1: return tri.num_cells() + tri.num_vertices();
  }
  return 0;
}

double cr_basis(const Triangulation& tri, Index c, int k, const Vec2& x) {
  return 1.0 - 2.0 * tri.barycentric(c, x)[k];
}

Vec2 cr_basis_gradient(const Triangulation& tri, Index c, int k) {
  return (1.0 / tri.cell_area(c)) * tri.cell_normal(c, k);
}

Vec2 p1_gradient(const Triangulation& tri, Index c, int k) {
  return (-0.5 / tri.cell_area(c)) * tri.cell_normal(c, k);
}

namespace {

void check_layout(const Triangulation& tri, const DofField& field) {
  if (field.values.size() != layout_size(tri, field.layout))
    throw InvalidArgument("field length does not match its layout");
}

std::array<Vec2, 3> corners(const Triangulation& tri, Index c) {
  const auto& v = tri.cell(c);
  return {tri.vertex(v[0]), tri.vertex(v[1]), tri.vertex(v[2])};
}

}  // namespace

DofField interpolate_cr(const Triangulation& tri, const ScalarFn& g) {
  DofField out = DofField::zeros(tri, Layout::CrScalar);
  const auto& rule = gauss_line_3();
  for (Index f = 0; f < static_cast<Index>(tri.num_facets()); ++f) {
    const auto& fv = tri.facet(f);
    const Vec2 a = tri.vertex(fv[0]), b = tri.vertex(fv[1]);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) s += rule.weights[q] * g(a + rule.points[q] * (b - a));
    out.values[f] = s;
  }
  return out;
}

DofField interpolate_cr(const Triangulation& tri, const VectorFn& g) {
  DofField out = DofField::zeros(tri, Layout::CrVector);
  const auto& rule = gauss_line_3();
  for (Index f = 0; f < static_cast<Index>(tri.num_facets()); ++f) {
    const auto& fv = tri.facet(f);
    const Vec2 a = tri.vertex(fv[0]), b = tri.vertex(fv[1]);
    Vec2 s{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) s += rule.weights[q] * g(a + rule.points[q] * (b - a));
    out.values[cr_dof(tri, f, 0)] = s.x;
    out.values[cr_dof(tri, f, 1)] = s.y;
  }
  return out;
}

double evaluate_scalar(const Triangulation& tri, const DofField& field, Index c,
                       const std::array<double, 3>& bary) {
  const auto& cf = tri.cell_facets(c);
  const auto& cv = tri.cell(c);
  const std::size_t nc = tri.num_cells();
  switch (field.layout) {
    case Layout::CrScalar: {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += field.values[cf[k]] * (1.0 - 2.0 * bary[k]);
      return s;
    }
    case Layout::P0: return field.values[c];
    case Layout::P1: {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += field.values[cv[k]] * bary[k];
      return s;
    }
    case Layout::P0PlusP1: {
      double s = field.values[c];
      for (int k = 0; k < 3; ++k) s += field.values[nc + cv[k]] * bary[k];
      return s;
    }
    case Layout::CrVector: break;
  }
  throw InvalidArgument("evaluate_scalar: vector layout");
}

Vec2 evaluate_vector(const Triangulation& tri, const DofField& field, Index c, const std::array<double, 3>& bary) {
  if (field.layout != Layout::CrVector) throw InvalidArgument("evaluate_vector: CR vector layout expected");
  const auto& cf = tri.cell_facets(c);
  Vec2 s{};
  for (int k = 0; k < 3; ++k) {
    const double psi = 1.0 - 2.0 * bary[k];
    s.x += field.values[cr_dof(tri, cf[k], 0)] * psi;
    s.y += field.values[cr_dof(tri, cf[k], 1)] * psi;
  }
  return s;
}

CsrMatrix assemble_stiffness(const Triangulation& tri, int components) {
  const auto nf = static_cast<std::int64_t>(tri.num_facets());
  std::vector<Triplet> t;
  t.reserve(9 * components * tri.num_cells());
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto& cf = tri.cell_facets(c);
    const double inv = 1.0 / tri.cell_area(c);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double v = dot(tri.cell_normal(c, a), tri.cell_normal(c, b)) * inv;
        for (int comp = 0; comp < components; ++comp) t.push_back({comp * nf + cf[a], comp * nf + cf[b], v});
      }
  }
  return compress(components * nf, components * nf, std::move(t));
}

CsrMatrix assemble_mass(const Triangulation& tri, bool lumped, int components) {
  // psi_a psi_b is quadratic, so the edge-midpoint rule is exact
  const auto nf = static_cast<std::int64_t>(tri.num_facets());
  const auto& rule = triangle_degree2();
  std::vector<Triplet> t;
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto& cf = tri.cell_facets(c);
    const double area = tri.cell_area(c);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double v = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q)
          v += rule.weights[q] * (1.0 - 2.0 * rule.points[q][a]) * (1.0 - 2.0 * rule.points[q][b]);
        v *= area;
        if (v == 0.0) continue;
        for (int comp = 0; comp < components; ++comp) {
          const auto row = comp * nf + cf[a];
          t.push_back({row, lumped ? row : comp * nf + cf[b], v});
        }
      }
  }
  return compress(components * nf, components * nf, std::move(t));
}

CsrMatrix assemble_divergence(const Triangulation& tri) {
  std::vector<Triplet> t;
  t.reserve(6 * tri.num_cells());
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto& cf = tri.cell_facets(c);
    for (int k = 0; k < 3; ++k) {
      const Vec2 s = tri.cell_normal(c, k);
      t.push_back({c, cr_dof(tri, cf[k], 0), s.x});
      t.push_back({c, cr_dof(tri, cf[k], 1), s.y});
    }
  }
  return compress(static_cast<std::int64_t>(tri.num_cells()), 2 * static_cast<std::int64_t>(tri.num_facets()),
                  std::move(t));
}

CsrMatrix assemble_p1_gradient_coupling(const Triangulation& tri) {
  // the integral of a CR basis function over a cell is |K|/3
  std::vector<Triplet> t;
  t.reserve(18 * tri.num_cells());
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto& cf = tri.cell_facets(c);
    const auto& cv = tri.cell(c);
    const double third = tri.cell_area(c) / 3.0;
    for (int j = 0; j < 3; ++j) {
      const Vec2 g = third * p1_gradient(tri, c, j);
      for (int k = 0; k < 3; ++k) {
        t.push_back({cv[j], cr_dof(tri, cf[k], 0), g.x});
        t.push_back({cv[j], cr_dof(tri, cf[k], 1), g.y});
      }
    }
  }
  return compress(static_cast<std::int64_t>(tri.num_vertices()), 2 * static_cast<std::int64_t>(tri.num_facets()),
                  std::move(t));
}

std::vector<double> p1_weights(const Triangulation& tri) {
  std::vector<double> w(tri.num_vertices(), 0.0);
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c)
    for (Index v : tri.cell(c)) w[v] += tri.cell_area(c) / 3.0;
  return w;
}

CsrMatrix assemble_p1_mass(const Triangulation& tri) {
  std::vector<Triplet> t;
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto& cv = tri.cell(c);
    const double a = tri.cell_area(c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.push_back({cv[i], cv[j], a * (i == j ? 1.0 / 6.0 : 1.0 / 12.0)});
  }
  const auto n = static_cast<std::int64_t>(tri.num_vertices());
  return compress(n, n, std::move(t));
}

std::vector<double> load_vector(const Triangulation& tri, const VectorFn& f) {
  std::vector<double> b(2 * tri.num_facets(), 0.0);
  const auto& rule = triangle_degree5();
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto x = corners(tri, c);
    const auto& cf = tri.cell_facets(c);
    const double area = tri.cell_area(c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec2 fv = (rule.weights[q] * area) * f(TriangleRule::map(x, l));
      for (int k = 0; k < 3; ++k) {
        const double psi = 1.0 - 2.0 * l[k];
        b[cr_dof(tri, cf[k], 0)] += fv.x * psi;
        b[cr_dof(tri, cf[k], 1)] += fv.y * psi;
      }
    }
  }
  return b;
}

double broken_norm(const Triangulation& tri, const DofField& field) {
  check_layout(tri, field);
  const int comps = field.layout == Layout::CrVector ? 2 : 1;
  if (field.layout != Layout::CrVector && field.layout != Layout::CrScalar)
    throw InvalidArgument("broken_norm: CR layout expected");
  const auto nf = static_cast<std::int64_t>(tri.num_facets());
  double s = 0.0;
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto& cf = tri.cell_facets(c);
    for (int comp = 0; comp < comps; ++comp) {
      Vec2 g{};
      for (int k = 0; k < 3; ++k) g += field.values[comp * nf + cf[k]] * tri.cell_normal(c, k);
      s += dot(g, g) / tri.cell_area(c);
    }
  }
  return std::sqrt(s);
}

double integrate(const Triangulation& tri, const ScalarFn& g, const TriangleRule& rule) {
  double s = 0.0;
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto x = corners(tri, c);
    double cs = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) cs += rule.weights[q] * g(TriangleRule::map(x, rule.points[q]));
    s += cs * tri.cell_area(c);
  }
  return s;
}

double integrate(const Triangulation& tri, const DofField& field) {
  check_layout(tri, field);
  // every supported scalar layout is affine per cell: the centroid rule is exact
  double s = 0.0;
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c)
    s += tri.cell_area(c) * evaluate_scalar(tri, field, c, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  return s;
}

double l2_norm(const Triangulation& tri, const ScalarFn& g, const TriangleRule& rule) {
  return std::sqrt(integrate(tri, [&](const Vec2& x) { const double v = g(x); return v * v; }, rule));
}

double l2_norm(const Triangulation& tri, const VectorFn& g, const TriangleRule& rule) {
  return std::sqrt(integrate(tri, [&](const Vec2& x) { const Vec2 v = g(x); return dot(v, v); }, rule));
}

double l2_norm(const Triangulation& tri, const DofField& field) {
  if (field.layout == Layout::CrVector) return l2_error(tri, field, VectorFn{}, triangle_degree2());
  return l2_error(tri, field, ScalarFn{}, triangle_degree2());
}

double l2_error(const Triangulation& tri, const DofField& field, const ScalarFn& exact, const TriangleRule& rule) {
  check_layout(tri, field);
  double s = 0.0;
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto x = corners(tri, c);
    double cs = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double e = evaluate_scalar(tri, field, c, rule.points[q]);
      if (exact) e -= exact(TriangleRule::map(x, rule.points[q]));
      cs += rule.weights[q] * e * e;
    }
    s += cs * tri.cell_area(c);
  }
  return std::sqrt(s);
}

double l2_error(const Triangulation& tri, const DofField& field, const VectorFn& exact, const TriangleRule& rule) {
  check_layout(tri, field);
  double s = 0.0;
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto x = corners(tri, c);
    double cs = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Vec2 e = evaluate_vector(tri, field, c, rule.points[q]);
      if (exact) e -= exact(TriangleRule::map(x, rule.points[q]));
      cs += rule.weights[q] * dot(e, e);
    }
    s += cs * tri.cell_area(c);
  }
  return std::sqrt(s);
}

double epsilon0_velocity(const Triangulation& tri, const DofField& uh, const VectorFn& u, bool zero_velocity,
                         double exact_norm) {
  if (zero_velocity) return l2_norm(tri, uh);
  if (!(exact_norm > 0.0)) throw InvalidArgument("epsilon0: exact velocity norm must be positive");
  return l2_error(tri, uh, u) / exact_norm;
}

double epsilon0_pressure(const Triangulation& tri, const DofField& ph, const ScalarFn& p, double exact_norm) {
  if (!(exact_norm > 0.0)) throw InvalidArgument("epsilon0: exact pressure norm must be positive");
  return l2_error(tri, ph, p) / exact_norm;
}

VelocityDofs velocity_dofs(const Triangulation& tri) {
  VelocityDofs d;
  const auto n = 2 * static_cast<std::int64_t>(tri.num_facets());
  d.to_free.assign(n, -1);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto f = static_cast<Index>(i % static_cast<std::int64_t>(tri.num_facets()));
    if (tri.facet_on_boundary(f)) {
      d.fixed.push_back(i);
    } else {
      d.to_free[i] = static_cast<std::int64_t>(d.free.size());
      d.free.push_back(i);
    }
  }
  return d;
}

}  // namespace ncr
