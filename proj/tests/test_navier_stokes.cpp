#include <doctest.h>

#include <cmath>
#include <random>

#include "ncr/error.hpp"
#include "ncr/kernels.hpp"
#include "ncr/navier_stokes.hpp"

using namespace ncr;

namespace {

std::vector<double> random_field(const Triangulation& tri, std::mt19937& rng, bool zero_boundary) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> u(2 * tri.num_facets());
  for (auto& v : u) v = dist(rng);
  if (zero_boundary)
    for (Index f = 0; f < static_cast<Index>(tri.num_facets()); ++f)
      if (tri.facet_on_boundary(f)) u[cr_dof(tri, f, 0)] = u[cr_dof(tri, f, 1)] = 0.0;
  return u;
}

double free_max(const Triangulation& tri, const std::vector<double>& v) {
  double m = 0.0;
  for (auto i : velocity_dofs(tri).free) m = std::max(m, std::abs(v[i]));
  return m;
}

double max_abs_difference_of(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("convection operator") {
  const auto tri = generate_kershaw(8, 0.3);
  std::mt19937 rng(7);

  const std::vector<double> zero(2 * tri.num_facets(), 0.0);
  CHECK(assemble_convection(tri, zero).nnz() == 0);

  for (int trial = 0; trial < 10; ++trial) {
    const auto w = random_field(tri, rng, false);
    const auto u = random_field(tri, rng, true);
    const auto l = assemble_convection(tri, w);
    CHECK(std::abs(kernels::dot(u, l * u)) <= 1e-12 * kernels::dot(u, u));
  }

  // constant fields are transported without change away from the boundary
  const auto c = interpolate_cr(tri, VectorFn([](const Vec2&) { return Vec2{0.7, -1.3}; }));
  CHECK(free_max(tri, assemble_convection(tri, c.values) * c.values) <= 1e-12);

  CHECK_THROWS_AS(assemble_convection(tri, std::vector<double>(3, 0.0)), InvalidArgument);
}

TEST_CASE("time step selection") {
  CHECK(transient_time_step(0.01, 0.5, 0.1) == doctest::Approx(0.01));
  CHECK(transient_time_step(0.01, 0.5, 0.0125) == doctest::Approx(0.005));
  for (double h : {0.1, 0.05, 0.025, 0.0125, 0.003}) {
    const double dt = transient_time_step(0.01, 0.5, h);
    CHECK(dt < 0.5 * h);
    const double steps = 0.01 / dt;
    CHECK(std::abs(steps - std::round(steps)) <= 1e-9);
  }
  CHECK_THROWS_AS(transient_time_step(0.01, 0.0, 0.1), InvalidArgument);
}

TEST_CASE("pressure projection") {
  const auto tri = generate_structured(6);
  const auto& affine = find_case("affine-p");
  // P1 contains the affine pressure
  const auto trio = project_pressure(tri, SchemeKind::TrioP0P1, affine.p());
  CHECK(l2_error(tri, trio, affine.p()) <= 1e-12);
  // P0 projection of an affine function is its centroid value
  const auto p0 = project_pressure(tri, SchemeKind::CrP0, affine.p());
  for (Index c = 0; c < static_cast<Index>(tri.num_cells()); ++c)
    CHECK(p0.values[c] == doctest::Approx(affine.pressure_at(tri.cell_centroid(c))).epsilon(1e-12));
}

TEST_CASE("projection steps") {
  const auto tri = generate_structured(6);
  const auto& gt = find_case("green-taylor");
  const double dt = 1e-3;

  for (auto scheme : {SchemeKind::CrP0, SchemeKind::TrioP0P1, SchemeKind::Mps}) {
    CAPTURE(scheme_name(scheme));
    const TransientSolver solver(tri, scheme, 1.0, dt);

    TransientState zero;
    zero.velocity = DofField::zeros(tri, Layout::CrVector);
    zero.pressure = DofField::zeros(tri, pressure_layout(scheme));
    const auto u0 = solver.predict(zero, VectorFn([](const Vec2&) { return Vec2{}; }), {});
    CHECK(kernels::max_abs(u0) == 0.0);

    // a discretely divergence-free U* needs no pressure increment
    const auto& tc4 = find_case("sin-sin");
    const auto stokes = solve_stokes(tri, solver.blocks(), 1.0, tc4.f(1.0), tc4.u());
    const auto dp0 = solver.pressure_update(zero, stokes.velocity.values, {}, tc4.u());
    CHECK(kernels::max_abs(dp0) <= 1e-10);
    const auto same = solver.correct(zero, stokes.velocity.values, dp0, {});
    CHECK(max_abs_difference_of(same, stokes.velocity.values) <= 1e-10);

    // one Green-Taylor step from exact data
    TransientState s;
    s.velocity = interpolate_cr(tri, gt.u(0.0));
    s.pressure = project_pressure(tri, scheme, gt.p(0.0));
    const auto u_star = solver.predict(s, gt.f(1.0, 0.0), gt.u(dt));
    const auto flux = solver.closure_flux(s, u_star, gt.f(1.0, dt));
    CHECK(flux.empty() == (scheme != SchemeKind::Mps));
    const auto dp = solver.pressure_update(s, u_star, flux, gt.u(dt));
    const auto u1 = solver.correct(s, u_star, dp, flux);
    CHECK(kernels::max_abs(assemble_divergence(tri) * u1) <= 1e-9);

    const auto bc = interpolate_cr(tri, gt.u(dt));
    for (auto i : velocity_dofs(tri).fixed) CHECK(u1[i] == bc.values[i]);
  }
}

TEST_CASE("Green-Taylor run") {
  const auto tri = generate_structured(8);
  const auto& gt = find_case("green-taylor");

  SUBCASE("zero final time returns the initial fields") {
    const auto r = run_transient(tri, SchemeKind::CrP0, 1.0, gt, {.t_max = 0.0});
    CHECK(r.steps == 0);
    CHECK(max_abs_difference_of(r.solution.velocity.values, interpolate_cr(tri, gt.u(0.0)).values) == 0.0);
  }

  for (auto scheme : {SchemeKind::CrP0, SchemeKind::TrioP0P1, SchemeKind::Mps})
    for (bool lumped : {false, true}) {
      CAPTURE(scheme_name(scheme));
      CAPTURE(lumped);
      const auto r = run_transient(tri, scheme, 1.0, gt, {.t_max = 0.004, .courant = 0.01, .lumped_projection = lumped});
      CHECK(r.steps == 4);
      CHECK(r.dt == doctest::Approx(0.001));
      for (const auto& h : r.history) CHECK(h.divergence <= 1e-9);
      CHECK(r.history.back().energy < r.initial_energy);
      const double err = l2_error(tri, r.solution.velocity, gt.u(0.004)) / l2_norm(tri, gt.u(0.004));
      CHECK(err < 0.1);
    }
}
