#include "ncr/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ncr/error.hpp"
#include "ncr/kernels.hpp"

namespace ncr {

namespace {

constexpr double kBlowUpLimit = 1e6;
constexpr double kDivergenceLimit = 1e-9;

CsrMatrix combine(const CsrMatrix& a, double sa, const CsrMatrix& b, double sb) {
  auto t = a.triplets();
  for (auto& e : t) e.value *= sa;
  for (auto e : b.triplets()) t.push_back({e.row, e.col, sb * e.value});
  return compress(a.rows(), a.cols(), std::move(t));
}

std::vector<double> restrict_to(std::span<const double> v, const std::vector<std::int64_t>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

// Values of a CR vector field and its (constant) gradient inside cell c.
struct CellVelocity {
  Vec2 value;
  Vec2 grad_x;  // gradient of the x component
  Vec2 grad_y;
};

CellVelocity cell_velocity(const Triangulation& tri, std::span<const double> u, Index c, const Vec2& x) {
  const auto l = tri.barycentric(c, x);
  const auto& cf = tri.cell_facets(c);
  CellVelocity r{};
  for (int k = 0; k < 3; ++k) {
    const double ux = u[cr_dof(tri, cf[k], 0)], uy = u[cr_dof(tri, cf[k], 1)];
    const double psi = 1.0 - 2.0 * l[k];
    const Vec2 g = cr_basis_gradient(tri, c, k);
    r.value = r.value + Vec2{psi * ux, psi * uy};
    r.grad_x = r.grad_x + ux * g;
    r.grad_y = r.grad_y + uy * g;
  }
  return r;
}

double kinetic_energy(const CsrMatrix& m, std::span<const double> u) {
  return 0.5 * kernels::dot(u, m * u);
}

}  // namespace

CsrMatrix assemble_convection(const Triangulation& tri, std::span<const double> w) {
  const auto nf = static_cast<std::int64_t>(tri.num_facets());
  if (static_cast<std::int64_t>(w.size()) != 2 * nf) throw InvalidArgument("convection: CR vector field expected");
  // psi_f is 1 at its own midpoint and 0 at the other two, so the midpoint rule
  // gives N[f, g] = |K|/3 w(M_f) . grad psi_g = (w_f . S_g) / 3 on each cell.
  std::vector<Triplet> t;
  t.reserve(36 * tri.num_cells());
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c) {
    const auto& cf = tri.cell_facets(c);
    for (int a = 0; a < 3; ++a) {
      const Vec2 wf{w[cf[a]], w[nf + cf[a]]};
      for (int b = 0; b < 3; ++b) {
        const double v = dot(wf, tri.cell_normal(c, b)) / 6.0;  // halved for the skew part
        if (v == 0.0) continue;
        for (int comp = 0; comp < 2; ++comp) {
          const auto row = comp * nf + cf[a], col = comp * nf + cf[b];
          t.push_back({row, col, v});
          t.push_back({col, row, -v});
        }
      }
    }
  }
  return compress(2 * nf, 2 * nf, std::move(t));
}

TransientSolver::TransientSolver(const Triangulation& tri, SchemeKind scheme, double nu, double dt,
                                 bool lumped_projection)
    : tri_(tri), blocks_(make_blocks(tri, scheme)), nu_(nu), dt_(dt), lumped_(lumped_projection) {
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  dofs_ = velocity_dofs(tri);
  mass_ = assemble_mass(tri);
  mtilde_ = combine(mass_, 1.0, blocks_.stiffness, dt * nu);
  // the CR mass matrix is diagonal already; the simplified projection drops dt nu K
  projection_mass_ = lumped_ ? assemble_mass(tri, true) : mtilde_;

  const auto& fr = dofs_.free;
  predictor_.emplace(submatrix(mtilde_, fr, fr), FactorKind::LDLT);
  corrector_.emplace(submatrix(projection_mass_, fr, fr), FactorKind::LDLT);

  // [Mp  dt G; B  0] on free velocity dofs and all pressure dofs
  const auto nfree = static_cast<std::int64_t>(fr.size());
  const auto np = static_cast<std::int64_t>(blocks_.num_pressure);
  auto t = submatrix(projection_mass_, fr, fr).triplets();
  const auto& to_free = dofs_.to_free;
  const auto& g = blocks_.gradient;
  for (std::int64_t r = 0; r < g.rows(); ++r) {
    if (to_free[r] < 0) continue;
    for (auto e = g.row_ptr()[r]; e < g.row_ptr()[r + 1]; ++e)
      t.push_back({to_free[r], nfree + g.col_idx()[e], dt * g.values()[e]});
  }
  const auto& b = blocks_.divergence;
  for (std::int64_t r = 0; r < b.rows(); ++r)
    for (auto e = b.row_ptr()[r]; e < b.row_ptr()[r + 1]; ++e)
      if (to_free[b.col_idx()[e]] >= 0) t.push_back({nfree + r, to_free[b.col_idx()[e]], b.values()[e]});
  std::vector<Constraint> cons;
  for (auto c : blocks_.pressure_means) {
    for (auto& [col, v] : c.row) col += nfree;
    cons.push_back(std::move(c));
  }
  projection_.emplace(compress(nfree + np, nfree + np, std::move(t)), std::move(cons));
}

std::vector<double> TransientSolver::predict(const TransientState& s, const VectorFn& f,
                                             const VectorFn& dirichlet) const {
  const auto& u = s.velocity.values;
  // M U^n + dt (F^n - L(U^n) U^n - G P^n - F_b flux^n)
  std::vector<double> rhs = mass_ * u;
  std::vector<double> force = load_vector(tri_, f);
  kernels::axpy(-1.0, assemble_convection(tri_, u) * u, force);
  kernels::axpy(-1.0, blocks_.gradient * s.pressure.values, force);
  if (blocks_.mpfa && !s.flux.empty()) kernels::axpy(-1.0, blocks_.mpfa->g0vec(s.flux), force);
  kernels::axpy(dt_, force, rhs);

  std::vector<double> u_star(u.size(), 0.0);
  if (dirichlet) {
    const auto bc = interpolate_cr(tri_, dirichlet);
    for (auto i : dofs_.fixed) u_star[i] = bc.values[i];
  }
  kernels::axpy(-1.0, mtilde_ * u_star, rhs);
  const auto x = predictor_->solve(restrict_to(rhs, dofs_.free));
  for (std::size_t i = 0; i < x.size(); ++i) u_star[dofs_.free[i]] = x[i];
  return u_star;
}

std::vector<double> TransientSolver::pressure_update(const TransientState& s, std::span<const double> u_star,
                                                     std::span<const double> flux, const VectorFn& dirichlet) const {
  const auto nfree = dofs_.free.size();
  // momentum rows: Mp U^{n+1} + dt G dP = Mp U* - dt F_b dflux (boundary terms cancel)
  std::vector<double> star_free(u_star.size(), 0.0);
  for (auto i : dofs_.free) star_free[i] = u_star[i];
  std::vector<double> top = projection_mass_ * star_free;
  if (blocks_.mpfa && !flux.empty()) {
    std::vector<double> dflux(flux.begin(), flux.end());
    if (!s.flux.empty()) kernels::axpy(-1.0, s.flux, dflux);
    kernels::axpy(-dt_, blocks_.mpfa->g0vec(dflux), top);
  }
  std::vector<double> rhs = restrict_to(top, dofs_.free);
  // continuity rows: B_free U^{n+1} = c(g) - B_fixed U_b^{n+1}
  std::vector<double> boundary(u_star.size(), 0.0);
  for (auto i : dofs_.fixed) boundary[i] = u_star[i];
  const auto bb = blocks_.divergence * boundary;
  const auto cont = continuity_rhs(tri_, blocks_, dirichlet);
  for (std::size_t i = 0; i < bb.size(); ++i) rhs.push_back(cont[i] - bb[i]);

  const std::vector<double> zeros(blocks_.pressure_means.size(), 0.0);
  const auto sol = projection_->solve(rhs, zeros);
  return std::vector<double>(sol.x.begin() + static_cast<std::ptrdiff_t>(nfree), sol.x.end());
}

std::vector<double> TransientSolver::correct(const TransientState& s, std::span<const double> u_star,
                                             std::span<const double> dp, std::span<const double> flux) const {
  std::vector<double> push = blocks_.gradient * dp;
  if (blocks_.mpfa && !flux.empty()) {
    std::vector<double> dflux(flux.begin(), flux.end());
    if (!s.flux.empty()) kernels::axpy(-1.0, s.flux, dflux);
    kernels::axpy(1.0, blocks_.mpfa->g0vec(dflux), push);
  }
  const auto x = corrector_->solve(restrict_to(push, dofs_.free));
  std::vector<double> u(u_star.begin(), u_star.end());
  for (std::size_t i = 0; i < x.size(); ++i) u[dofs_.free[i]] -= dt_ * x[i];
  return u;
}

std::vector<double> TransientSolver::closure_flux(const TransientState& s, std::span<const double> u_star,
                                                  const VectorFn& f) const {
  if (!blocks_.mpfa) return {};
  const auto& un = s.velocity.values;
  return boundary_flux(*blocks_.mpfa, [&](Index c, const Vec2& x) {
    const auto a = cell_velocity(tri_, un, c, x);
    const auto b = cell_velocity(tri_, u_star, c, x);
    const Vec2 conv{dot(a.value, a.grad_x), dot(a.value, a.grad_y)};
    return f(x) - (1.0 / dt_) * (b.value - a.value) - conv;
  });
}

double transient_time_step(double t_max, double courant, double h) {
  if (!(t_max > 0.0) || !(courant > 0.0) || !(h > 0.0))
    throw InvalidArgument("time step needs positive t_max, courant number and h");
  const double steps = std::floor(t_max / (courant * h)) + 1.0;
  return t_max / steps;
}

DofField project_pressure(const Triangulation& tri, SchemeKind scheme, const ScalarFn& p) {
  const auto nc = tri.num_cells();
  const auto& rule = triangle_degree5();
  // cell integrals of p and of p lambda_k
  std::vector<double> cell_mean(nc, 0.0);
  std::vector<double> vertex_load(tri.num_vertices(), 0.0);
  for (Index c = 0; c < static_cast<Index>(nc); ++c) {
    const auto& v = tri.cell(c);
    const std::array<Vec2, 3> corners{tri.vertex(v[0]), tri.vertex(v[1]), tri.vertex(v[2])};
    const double area = tri.cell_area(c);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const double w = area * rule.weights[q] * p(TriangleRule::map(corners, rule.points[q]));
      cell_mean[c] += w;
      for (int k = 0; k < 3; ++k) vertex_load[v[k]] += w * rule.points[q][k];
    }
  }
  if (scheme != SchemeKind::TrioP0P1) {
    double mean = 0.0, area = 0.0;
    for (Index c = 0; c < static_cast<Index>(nc); ++c) {
      mean += cell_mean[c];
      area += tri.cell_area(c);
      cell_mean[c] /= tri.cell_area(c);
    }
    for (auto& v : cell_mean) v -= mean / area;
    return {Layout::P0, std::move(cell_mean)};
  }

  // Gram system on P0 + P1 with both parts at zero mean; the constraints remove
  // the constant shared by the two spaces.
  const auto nv = static_cast<std::int64_t>(tri.num_vertices());
  const auto n0 = static_cast<std::int64_t>(nc);
  std::vector<Triplet> t;
  for (Index c = 0; c < static_cast<Index>(nc); ++c) {
    const double area = tri.cell_area(c);
    t.push_back({c, c, area});
    for (Index v : tri.cell(c)) {
      t.push_back({c, n0 + v, area / 3.0});
      t.push_back({n0 + v, c, area / 3.0});
    }
  }
  for (auto e : assemble_p1_mass(tri).triplets()) t.push_back({n0 + e.row, n0 + e.col, e.value});
  std::vector<double> rhs = cell_mean;
  rhs.insert(rhs.end(), vertex_load.begin(), vertex_load.end());
  LinearSystem sys{compress(n0 + nv, n0 + nv, std::move(t)), std::move(rhs), {}};
  Constraint c0, c1;
  for (Index c = 0; c < static_cast<Index>(nc); ++c) c0.row.emplace_back(c, tri.cell_area(c));
  const auto w = p1_weights(tri);
  for (std::int64_t v = 0; v < nv; ++v) c1.row.emplace_back(n0 + v, w[v]);
  sys.constraints = {std::move(c0), std::move(c1)};
  return {Layout::P0PlusP1, solve_bordered(sys).x};
}

TransientResult run_transient(const Triangulation& tri, SchemeKind scheme, double nu, const ManufacturedCase& c,
                              const TransientOptions& options) {
  if (!(options.t_max >= 0.0)) throw InvalidArgument("t_max must be non-negative");
  TransientResult out;
  const double h = tri.mesh_size();
  TransientState s;
  s.velocity = interpolate_cr(tri, c.u(0.0));
  s.pressure = project_pressure(tri, scheme, c.p(0.0));
  out.blocks = make_blocks(tri, scheme);
  const CsrMatrix mass = assemble_mass(tri);
  out.initial_energy = kinetic_energy(mass, s.velocity.values);

  if (out.blocks.mpfa) {
    // exact closure at t = 0: f - du/dt - (u . grad) u
    s.flux = boundary_flux(*out.blocks.mpfa, [&](const Vec2& x) {
      const auto u = c.velocity_jet(Jet::variable(x.x, 0), Jet::variable(x.y, 1), Jet::variable(0.0, 2));
      const Vec2 f = c.forcing(x, nu, 0.0);
      Vec2 r;
      r.x = f.x - u[0].d[2] - (u[0].v * u[0].d[0] + u[1].v * u[0].d[1]);
      r.y = f.y - u[1].d[2] - (u[0].v * u[1].d[0] + u[1].v * u[1].d[1]);
      return r;
    });
  }

  if (options.t_max > 0.0) {
    out.dt = transient_time_step(options.t_max, options.courant, h);
    if (!(out.dt < options.courant * h)) throw InvalidArgument("time step violates dt < C h");
    out.steps = static_cast<int>(std::lround(options.t_max / out.dt));
    const TransientSolver solver(tri, scheme, nu, out.dt, options.lumped_projection);
    const CsrMatrix d = assemble_divergence(tri);
    for (int n = 0; n < out.steps; ++n) {
      const double t0 = n * out.dt, t1 = (n + 1) * out.dt;
      const auto u_star = solver.predict(s, c.f(nu, t0), c.u(t1));
      const auto flux = solver.closure_flux(s, u_star, c.f(nu, t1));
      const auto dp = solver.pressure_update(s, u_star, flux, c.u(t1));
      auto u = solver.correct(s, u_star, dp, flux);

      const double size = kernels::max_abs(u);
      if (!(size <= kBlowUpLimit)) {
        std::ostringstream os;
        os << "velocity reached " << size << " at step " << n + 1;
        throw BlowUp(os.str());
      }
      const double div = kernels::max_abs(d * u);
      if (!(div <= kDivergenceLimit * std::max(1.0, size))) {
        std::ostringstream os;
        os << "discrete divergence " << div << " after step " << n + 1;
        throw NumericalError(os.str());
      }
      s.velocity.values = std::move(u);
      kernels::axpy(1.0, dp, s.pressure.values);
      if (!flux.empty()) s.flux = flux;
      s.time = t1;
      out.history.push_back({n + 1, t1, div, kinetic_energy(mass, s.velocity.values)});
    }
  }

  out.solution.velocity = std::move(s.velocity);
  out.solution.pressure = std::move(s.pressure);
  out.solution.scheme = scheme;
  out.solution.nu = nu;
  out.solution.boundary_flux = std::move(s.flux);
  return out;
}

}  // namespace ncr
