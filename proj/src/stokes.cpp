#include "ncr/stokes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "ncr/error.hpp"
#include "ncr/kernels.hpp"

namespace ncr {

std::string_view scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::CrP0: return "crp0";
    case SchemeKind::TrioP0P1: return "trio";
    case SchemeKind::Mps: return "mps";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "cr" || s == "crp0") return SchemeKind::CrP0;
  if (s == "trio" || s == "triop0p1") return SchemeKind::TrioP0P1;
  if (s == "mps") return SchemeKind::Mps;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "' (known: crp0, trio, mps)");
}

Layout pressure_layout(SchemeKind s) { return s == SchemeKind::TrioP0P1 ? Layout::P0PlusP1 : Layout::P0; }

namespace {

CsrMatrix scaled(const CsrMatrix& a, double s) {
  auto t = a.triplets();
  for (auto& e : t) e.value *= s;
  return compress(a.rows(), a.cols(), std::move(t));
}

Constraint mean_constraint(std::size_t offset, const std::vector<double>& w) {
  Constraint c;
  for (std::size_t i = 0; i < w.size(); ++i) c.row.emplace_back(static_cast<std::int64_t>(offset + i), w[i]);
  return c;
}

}  // namespace

StokesBlocks make_blocks(const Triangulation& tri, SchemeKind scheme) {
  StokesBlocks b;
  b.scheme = scheme;
  b.stiffness = assemble_stiffness(tri);
  const CsrMatrix d = assemble_divergence(tri);
  std::vector<double> areas(tri.num_cells());
  for (Index c = 0; c < static_cast<Index>(areas.size()); ++c) areas[c] = tri.cell_area(c);
  b.pressure_means.push_back(mean_constraint(0, areas));

  switch (scheme) {
    case SchemeKind::CrP0:
      b.divergence = scaled(d, -1.0);
      b.gradient = b.divergence.transposed();
      break;
    case SchemeKind::TrioP0P1: {
      const CsrMatrix c = assemble_p1_gradient_coupling(tri);
      auto t = scaled(d, -1.0).triplets();
      const auto nc = static_cast<std::int64_t>(tri.num_cells());
      for (auto e : c.triplets()) t.push_back({e.row + nc, e.col, e.value});
      b.divergence = compress(nc + c.rows(), d.cols(), std::move(t));
      b.gradient = b.divergence.transposed();
      b.pressure_means.push_back(mean_constraint(tri.num_cells(), p1_weights(tri)));
      break;
    }
    case SchemeKind::Mps:
      b.divergence = scaled(d, -1.0);
      b.mpfa = assemble_mpfa(tri);
      b.gradient = b.mpfa->gmat;
      break;
  }
  b.num_pressure = static_cast<std::size_t>(b.divergence.rows());
  return b;
}

std::vector<double> boundary_forcing(const StokesBlocks& blocks, const VectorFn& g) {
  if (!blocks.mpfa) return std::vector<double>(blocks.stiffness.rows(), 0.0);
  return blocks.mpfa->g0vec(boundary_flux(*blocks.mpfa, g));
}

std::vector<double> continuity_rhs(const Triangulation& tri, const StokesBlocks& blocks, const VectorFn& g) {
  std::vector<double> r(blocks.num_pressure, 0.0);
  if (blocks.scheme != SchemeKind::TrioP0P1 || !g) return r;
  const auto nc = tri.num_cells();
  const auto& rule = gauss_line_3();
  for (Index f = 0; f < static_cast<Index>(tri.num_facets()); ++f) {
    if (!tri.facet_on_boundary(f)) continue;
    const auto [a, b] = tri.facet(f);
    const Vec2 pa = tri.vertex(a), pb = tri.vertex(b), n = tri.facet_normal(f);
    // lambda_a falls linearly from 1 at a to 0 at b
    r[nc + a] += rule.integrate(pa, pb, [&](const Vec2& x) { return dot(g(x), n) * norm(x - pb) / norm(pa - pb); });
    r[nc + b] += rule.integrate(pa, pb, [&](const Vec2& x) { return dot(g(x), n) * norm(x - pa) / norm(pa - pb); });
  }
  return r;
}

StokesSystem assemble_stokes(const Triangulation& tri, const StokesBlocks& blocks, double nu, const VectorFn& f,
                             const VectorFn& dirichlet) {
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  StokesSystem s;
  s.dofs = velocity_dofs(tri);
  const auto nfree = static_cast<std::int64_t>(s.dofs.free.size());
  const auto np = static_cast<std::int64_t>(blocks.num_pressure);

  s.prescribed.assign(blocks.stiffness.rows(), 0.0);
  if (dirichlet) {
    const auto bc = interpolate_cr(tri, dirichlet);
    for (auto i : s.dofs.fixed) s.prescribed[i] = bc.values[i];
  }

  if (blocks.scheme == SchemeKind::TrioP0P1) {
    const auto rep = validate(tri);
    if (!rep.hypothesis_41())
      s.warnings.push_back(std::to_string(rep.hypothesis_41_violations.size()) +
                           " cell(s) have two boundary edges; the P0+P1 pressure is not uniquely determined");
  }

  auto load = load_vector(tri, f);
  if (blocks.mpfa) {
    s.boundary_flux = boundary_flux(*blocks.mpfa, f);
    kernels::axpy(-1.0, blocks.mpfa->g0vec(s.boundary_flux), load);
  }

  std::vector<Triplet> t;
  t.reserve(blocks.stiffness.nnz() + 2 * blocks.gradient.nnz());
  std::vector<double> rhs(nfree + np, 0.0);
  for (std::int64_t i = 0; i < nfree; ++i) rhs[i] = load[s.dofs.free[i]];
  const auto cont = continuity_rhs(tri, blocks, dirichlet);
  for (std::int64_t i = 0; i < np; ++i) rhs[nfree + i] = cont[i];

  const auto& to_free = s.dofs.to_free;
  const auto& k = blocks.stiffness;
  for (std::int64_t r = 0; r < k.rows(); ++r) {
    const auto fr = to_free[r];
    if (fr < 0) continue;
    for (auto e = k.row_ptr()[r]; e < k.row_ptr()[r + 1]; ++e) {
      const auto c = k.col_idx()[e];
      const double v = nu * k.values()[e];
      if (to_free[c] >= 0)
        t.push_back({fr, to_free[c], v});
      else
        rhs[fr] -= v * s.prescribed[c];
    }
  }
  const auto& g = blocks.gradient;
  for (std::int64_t r = 0; r < g.rows(); ++r) {
    const auto fr = to_free[r];
    if (fr < 0) continue;
    for (auto e = g.row_ptr()[r]; e < g.row_ptr()[r + 1]; ++e) t.push_back({fr, nfree + g.col_idx()[e], g.values()[e]});
  }
  const auto& b = blocks.divergence;
  for (std::int64_t r = 0; r < b.rows(); ++r)
    for (auto e = b.row_ptr()[r]; e < b.row_ptr()[r + 1]; ++e) {
      const auto c = b.col_idx()[e];
      if (to_free[c] >= 0)
        t.push_back({nfree + r, to_free[c], b.values()[e]});
      else
        rhs[nfree + r] -= b.values()[e] * s.prescribed[c];
    }

  s.system.matrix = compress(nfree + np, nfree + np, std::move(t));
  s.system.rhs = std::move(rhs);
  for (auto c : blocks.pressure_means) {
    for (auto& [col, v] : c.row) col += nfree;
    s.system.constraints.push_back(std::move(c));
  }
  return s;
}

StokesSystem assemble_stokes(const Triangulation& tri, SchemeKind scheme, double nu, const VectorFn& f,
                             const VectorFn& dirichlet) {
  return assemble_stokes(tri, make_blocks(tri, scheme), nu, f, dirichlet);
}

StokesSolution solve_stokes(const Triangulation& tri, const StokesBlocks& blocks, double nu, const VectorFn& f,
                            const VectorFn& dirichlet) {
  auto s = assemble_stokes(tri, blocks, nu, f, dirichlet);
  auto sol = solve_bordered(s.system);
  const double rhs_norm = std::max(1.0, kernels::max_abs(s.system.rhs));
  for (double m : sol.multipliers)
    if (!(std::abs(m) <= kMultiplierLimit * rhs_norm)) {
      std::ostringstream os;
      os << "pressure mean multiplier " << m << " exceeds " << kMultiplierLimit << " * ||rhs||";
      throw InfSupFailure(os.str());
    }

  StokesSolution out;
  out.scheme = blocks.scheme;
  out.nu = nu;
  out.velocity = {Layout::CrVector, s.prescribed};
  for (std::size_t i = 0; i < s.dofs.free.size(); ++i) out.velocity.values[s.dofs.free[i]] = sol.x[i];
  out.pressure = {pressure_layout(blocks.scheme),
                  std::vector<double>(sol.x.begin() + static_cast<std::ptrdiff_t>(s.dofs.free.size()), sol.x.end())};
  out.multipliers = std::move(sol.multipliers);
  out.warnings = std::move(s.warnings);
  out.boundary_flux = std::move(s.boundary_flux);
  return out;
}

StokesSolution solve_stokes(const Triangulation& tri, SchemeKind scheme, double nu, const ManufacturedCase& c) {
  return solve_stokes(tri, make_blocks(tri, scheme), nu, c.f(nu), c.zero_velocity ? VectorFn{} : c.u());
}

double pressure_l2_error(const Triangulation& tri, const StokesBlocks& blocks, const StokesSolution& sol,
                         const ScalarFn& p) {
  if (blocks.mpfa) return reconstruction_l2_error(tri, *blocks.mpfa, sol.pressure.values, sol.boundary_flux, p);
  return l2_error(tri, sol.pressure, p);
}

}  // namespace ncr
