#include "ncr/mpfa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ncr/error.hpp"
#include "ncr/quadrature.hpp"

namespace ncr {

Vec2 LocalReconstruction::gradient(std::size_t i, std::span<const double> cell_values,
                                   std::span<const double> flux) const {
  Vec2 g{};
  for (std::size_t l = 0; l < coeff[i].size(); ++l) g += cell_values[l] * coeff[i][l];
  for (std::size_t b = 0; b < flux_coeff[i].size() && b < flux.size(); ++b) g += flux[b] * flux_coeff[i][b];
  return g;
}

std::vector<double> LocalReconstruction::auxiliary(std::span<const double> cell_values,
                                                   std::span<const double> flux) const {
  std::vector<double> q(aux_cells.size(), 0.0);
  for (std::size_t e = 0; e < q.size(); ++e) {
    for (std::size_t l = 0; l < aux_cells[e].size(); ++l) q[e] += aux_cells[e][l] * cell_values[l];
    for (std::size_t b = 0; b < aux_flux[e].size() && b < flux.size(); ++b) q[e] += aux_flux[e][b] * flux[b];
  }
  return q;
}

Vec2 local_gradient_formula(const MacroElement& m, std::size_t i, double qt_i, double qt_ip1, double qbar_i) {
  const double alpha = 1.5 / m.cell_areas[i];
  return alpha * (qt_i * m.normal_first[i] + qt_ip1 * m.normal_second[i] + qbar_i * m.normal_opposite[i]);
}

namespace {

using Dense = std::vector<std::vector<double>>;

double norm1(const Dense& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i][j]);
    best = std::max(best, s);
  }
  return best;
}

// Inverse by Gaussian elimination with partial pivoting. Returns false on a zero pivot.
bool invert(Dense a, Dense& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (a[p][k] == 0.0) return false;
    std::swap(a[k], a[p]);
    std::swap(inv[k], inv[p]);
    const double piv = a[k][k];
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a[i][k] / piv;
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      for (std::size_t j = 0; j < n; ++j) inv[i][j] -= f * inv[k][j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double piv = a[i][i];
    for (std::size_t j = 0; j < n; ++j) inv[i][j] /= piv;
  }
  return true;
}

// One equation w . G_i contributed by fan cell i.
void add_flux_row(const MacroElement& m, std::size_t i, const Vec2& w, double scale, std::vector<double>& arow,
                  std::vector<double>& qrow) {
  const double alpha = scale * 1.5 / m.cell_areas[i];
  arow[i] += alpha * dot(m.normal_first[i], w);
  arow[m.next_edge(i)] += alpha * dot(m.normal_second[i], w);
  qrow[i] -= alpha * dot(m.normal_opposite[i], w);
}

LocalReconstruction solve_local(const MacroElement& m) {
  const std::size_t nc = m.num_cells();
  const std::size_t ne = m.num_edges();
  const std::size_t nb = m.is_boundary ? 2 : 0;
  Dense a(ne, std::vector<double>(ne, 0.0));
  Dense rq(ne, std::vector<double>(nc, 0.0));
  Dense rf(ne, std::vector<double>(nb, 0.0));

  // flux continuity G_{e-1} . S_{e,e-1} + G_e . S_{e,e} = 0 on inner edges
  const std::size_t first = m.is_boundary ? 1 : 0;
  const std::size_t last = m.is_boundary ? nc : ne;
  for (std::size_t e = first; e < last; ++e) {
    const std::size_t prev = (e + nc - 1) % nc;
    add_flux_row(m, prev, m.normal_second[prev], 1.0, a[e], rq[e]);
    add_flux_row(m, e, m.normal_first[e], 1.0, a[e], rq[e]);
  }
  if (m.is_boundary) {
    // half-edge flux: |F~| G . n = G . S / 2
    add_flux_row(m, 0, m.normal_first[0], 0.5, a[0], rq[0]);
    rf[0][0] = 1.0;
    add_flux_row(m, nc - 1, m.normal_second[nc - 1], 0.5, a[ne - 1], rq[ne - 1]);
    rf[ne - 1][1] = 1.0;
  }

  Dense inv;
  const bool ok = invert(a, inv);
  const double cond = ok ? norm1(a) * norm1(inv) : INFINITY;
  if (!(cond <= kLocalConditionLimit)) {
    std::ostringstream os;
    os << "local MPFA system at vertex " << m.center << " is near singular (condition " << cond << ", "
       << nc << " cells, " << (m.is_boundary ? "boundary" : "interior") << " fan)";
    throw NearSingularLocalSystem(os.str(), static_cast<std::size_t>(m.center));
  }

  LocalReconstruction r;
  r.macro = m;
  r.condition = cond;
  r.aux_cells.assign(ne, std::vector<double>(nc, 0.0));
  r.aux_flux.assign(ne, std::vector<double>(nb, 0.0));
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t k = 0; k < ne; ++k) {
      for (std::size_t l = 0; l < nc; ++l) r.aux_cells[e][l] += inv[e][k] * rq[k][l];
      for (std::size_t b = 0; b < nb; ++b) r.aux_flux[e][b] += inv[e][k] * rf[k][b];
    }

  r.coeff.assign(nc, std::vector<Vec2>(nc));
  r.flux_coeff.assign(nc, std::vector<Vec2>(nb));
  for (std::size_t i = 0; i < nc; ++i) {
    const double alpha = 1.5 / m.cell_areas[i];
    const std::size_t j = m.next_edge(i);
    for (std::size_t l = 0; l < nc; ++l) {
      Vec2 c = r.aux_cells[i][l] * m.normal_first[i] + r.aux_cells[j][l] * m.normal_second[i];
      if (l == i) c += m.normal_opposite[i];
      r.coeff[i][l] = alpha * c;
    }
    for (std::size_t b = 0; b < nb; ++b)
      r.flux_coeff[i][b] = alpha * (r.aux_flux[i][b] * m.normal_first[i] + r.aux_flux[j][b] * m.normal_second[i]);
  }
  return r;
}

}  // namespace

LocalReconstruction eliminate_interior(const MacroElement& m) {
  if (m.is_boundary) throw InvalidArgument("eliminate_interior on a boundary fan");
  return solve_local(m);
}

LocalReconstruction eliminate_boundary(const MacroElement& m) {
  if (!m.is_boundary) throw InvalidArgument("eliminate_boundary on an interior fan");
  return solve_local(m);
}

LocalReconstruction eliminate(const MacroElement& m) { return solve_local(m); }

MpfaOperator assemble_mpfa(const Triangulation& tri) {
  MpfaOperator op;
  const auto nv = static_cast<Index>(tri.num_vertices());
  op.local.reserve(nv);
  op.vertex_half_edges.assign(nv, {-1, -1});

  auto add_half_edge = [&](Index j, Index facet) {
    const Index cell = tri.facet_cells(facet)[0];
    op.half_edges.push_back({facet, j, cell, tri.vertex(j), tri.facet_midpoint(facet), tri.facet_normal(facet)});
    return static_cast<std::int64_t>(op.half_edges.size() - 1);
  };

  std::vector<Triplet> gt, ft;
  for (Index j = 0; j < nv; ++j) {
    op.local.push_back(eliminate(macro_element(tri, j)));
    const auto& r = op.local.back();
    const auto& m = r.macro;
    if (m.is_boundary)
      op.vertex_half_edges[j] = {add_half_edge(j, m.edges.front()), add_half_edge(j, m.edges.back())};
    for (std::size_t i = 0; i < m.num_cells(); ++i) {
      const Index cell = m.cells[i];
      const auto& q = m.quads[i];
      const auto bary = tri.barycentric(cell, q.centroid);
      const auto& cf = tri.cell_facets(cell);
      for (int k = 0; k < 3; ++k) {
        const double w = q.area * (1.0 - 2.0 * bary[k]);
        for (int comp = 0; comp < 2; ++comp) {
          const auto row = cr_dof(tri, cf[k], comp);
          for (std::size_t l = 0; l < m.num_cells(); ++l) gt.push_back({row, m.cells[l], w * r.coeff[i][l][comp]});
          for (std::size_t b = 0; b < r.flux_coeff[i].size(); ++b)
            ft.push_back({row, op.vertex_half_edges[j][b], w * r.flux_coeff[i][b][comp]});
        }
      }
    }
  }
  const auto rows = 2 * static_cast<std::int64_t>(tri.num_facets());
  op.gmat = compress(rows, static_cast<std::int64_t>(tri.num_cells()), std::move(gt));
  op.fmat = compress(rows, static_cast<std::int64_t>(op.half_edges.size()), std::move(ft));
  return op;
}

std::vector<double> boundary_flux(const MpfaOperator& op, const std::function<Vec2(Index, const Vec2&)>& f) {
  std::vector<double> flux(op.half_edges.size(), 0.0);
  const auto& rule = gauss_line_2();
  for (std::size_t h = 0; h < flux.size(); ++h) {
    const auto& he = op.half_edges[h];
    flux[h] = rule.integrate(he.from, he.to, [&](const Vec2& x) { return dot(f(he.cell, x), he.normal); });
  }
  return flux;
}

std::vector<double> boundary_flux(const MpfaOperator& op, const VectorFn& f) {
  return boundary_flux(op, [&](Index, const Vec2& x) { return f(x); });
}

std::vector<QuadrangleGradient> reconstruct_field(const Triangulation& tri, const MpfaOperator& op,
                                                  std::span<const double> pressure, std::span<const double> flux) {
  if (pressure.size() != tri.num_cells()) throw InvalidArgument("reconstruct_field: P0 pressure expected");
  std::vector<QuadrangleGradient> out;
  out.reserve(3 * tri.num_cells());
  std::vector<double> local_q, local_f;
  for (std::size_t j = 0; j < op.local.size(); ++j) {
    const auto& r = op.local[j];
    const auto& m = r.macro;
    local_q.clear();
    for (Index c : m.cells) local_q.push_back(pressure[c]);
    local_f.clear();
    if (m.is_boundary && !flux.empty())
      for (auto h : op.vertex_half_edges[j]) local_f.push_back(flux[h]);
    for (std::size_t i = 0; i < m.num_cells(); ++i)
      out.push_back({m.center, m.cells[i], m.quads[i].area, m.quads[i].centroid, r.gradient(i, local_q, local_f)});
  }
  return out;
}

double reconstruction_l2_error(const Triangulation& tri, const MpfaOperator& op, std::span<const double> pressure,
                               std::span<const double> flux, const ScalarFn& p) {
  const auto& rule = triangle_degree5();
  const auto fields = reconstruct_field(tri, op, pressure, flux);
  double sum = 0.0;
  std::size_t next = 0;
  for (const auto& r : op.local) {
    const auto& m = r.macro;
    for (std::size_t i = 0; i < m.num_cells(); ++i) {
      const Index c = m.cells[i];
      const Vec2 grad = fields[next++].gradient;
      const Vec2 xc = tri.cell_centroid(c);
      const auto& q = m.quads[i].corners;
      for (const auto& t : {std::array<Vec2, 3>{q[0], q[1], q[2]}, std::array<Vec2, 3>{q[0], q[2], q[3]}}) {
        const double area = 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
        for (std::size_t k = 0; k < rule.weights.size(); ++k) {
          const Vec2 x = TriangleRule::map(t, rule.points[k]);
          const double e = pressure[c] + dot(grad, x - xc) - p(x);
          sum += area * rule.weights[k] * e * e;
        }
      }
    }
  }
  return std::sqrt(sum);
}

}  // namespace ncr
