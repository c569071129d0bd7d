#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ncr/error.hpp"
#include "ncr/kernels.hpp"
#include "ncr/stokes.hpp"

using namespace ncr;

namespace {

constexpr double pi = std::numbers::pi;

double velocity_norm(const Triangulation& tri, const StokesSolution& s) {
  return l2_norm(tri, s.velocity);
}

bool symmetric(const CsrMatrix& a, double tol) {
  return max_abs_difference(a, a.transposed()) <= tol * std::max(1.0, a.max_abs());
}

}  // namespace

TEST_CASE("built-in cases") {
  const auto& all = builtin_cases();
  CHECK(all.size() == 7);
  for (const auto& c : all)
    for (double nu : {1.0, 1e-3}) {
      CAPTURE(c.name);
      CHECK(forcing_residual(c, nu) <= 1e-10);
      if (c.time_dependent) CHECK(forcing_residual(c, nu, 0.005) <= 1e-10);
    }
  CHECK_THROWS_AS(find_case("nope"), InvalidArgument);

  // values from an independent symbolic differentiation of the sin-sin case
  const auto& tc4 = find_case("sin-sin");
  const Vec2 a = tc4.forcing({0.25, 0.25}, 1.0, 0.0);
  CHECK(a.x == doctest::Approx(-39.478417604357434475).epsilon(1e-13));
  CHECK(a.y == doctest::Approx(39.478417604357434475).epsilon(1e-13));
  const Vec2 b = tc4.forcing({1.0 / 3.0, 0.2}, 1e-3, 0.0);
  CHECK(b.x == doctest::Approx(-3.0629245773728468324).epsilon(1e-13));
  CHECK(b.y == doctest::Approx(1.6945436391453475293).epsilon(1e-13));

  const auto& noflow = find_case("noflow-sin");
  const Vec2 g = noflow.forcing({0.1, 0.3}, 0.5, 0.0);
  CHECK(g.x == doctest::Approx(2 * pi * std::cos(0.2 * pi) * std::sin(0.6 * pi)));
  CHECK(g.y == doctest::Approx(2 * pi * std::sin(0.2 * pi) * std::cos(0.6 * pi)));

  // Green-Taylor is an exact Navier-Stokes solution at nu = 1
  const auto& gt = find_case("green-taylor");
  for (double t : {0.0, 0.004}) {
    const Vec2 f = gt.forcing({0.3, 0.7}, 1.0, t);
    CHECK(std::abs(f.x) + std::abs(f.y) <= 1e-12);
  }
}

TEST_CASE("saddle system structure") {
  const auto tri = generate_structured(4);
  const auto f = find_case("noflow-sin").f(1.0);

  const auto cr = assemble_stokes(tri, SchemeKind::CrP0, 1.0, f);
  CHECK(symmetric(cr.system.matrix, 1e-14));
  CHECK(cr.system.constraints.size() == 1);

  const auto trio = assemble_stokes(tri, SchemeKind::TrioP0P1, 1.0, f);
  CHECK(symmetric(trio.system.matrix, 1e-14));
  CHECK(trio.system.constraints.size() == 2);
  CHECK(trio.system.matrix.rows() ==
        static_cast<std::int64_t>(cr.dofs.free.size() + tri.num_cells() + tri.num_vertices()));
  CHECK(trio.warnings.empty());

  const auto mps = assemble_stokes(tri, SchemeKind::Mps, 1.0, f);
  CHECK_FALSE(symmetric(mps.system.matrix, 1e-6));
  CHECK(mps.system.matrix.rows() == cr.system.matrix.rows());
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme("CR") == SchemeKind::CrP0);
  CHECK(parse_scheme("crp0") == SchemeKind::CrP0);
  CHECK(parse_scheme("Trio") == SchemeKind::TrioP0P1);
  CHECK(parse_scheme("mps") == SchemeKind::Mps);
  CHECK_THROWS_AS(parse_scheme("p2p1"), InvalidArgument);
  for (auto s : {SchemeKind::CrP0, SchemeKind::TrioP0P1, SchemeKind::Mps}) CHECK(parse_scheme(scheme_name(s)) == s);
}

TEST_CASE("exact discrete solutions") {
  const auto tri = generate_structured(8);
  for (auto s : {SchemeKind::TrioP0P1, SchemeKind::Mps}) {
    CAPTURE(scheme_name(s));
    for (double nu : {1.0, 1e-3}) {
      const auto sol = solve_stokes(tri, s, nu, find_case("affine-p"));
      CHECK(velocity_norm(tri, sol) <= 1e-10);
    }
  }
  const auto q = solve_stokes(tri, SchemeKind::TrioP0P1, 1e-3, find_case("quadratic-p"));
  CHECK(velocity_norm(tri, q) <= 1e-9);

  // CrP0 only sees the gradient through -D^T, so even affine p leaves spurious velocity
  const auto cr = solve_stokes(tri, SchemeKind::CrP0, 1.0, find_case("quadratic-p"));
  CHECK(velocity_norm(tri, cr) > 1e-6);
}

TEST_CASE("discrete divergence and pressure normalization") {
  const auto tri = generate_structured(6);
  const auto& c = find_case("sin-sin");
  const CsrMatrix d = assemble_divergence(tri);
  for (auto s : {SchemeKind::CrP0, SchemeKind::TrioP0P1, SchemeKind::Mps}) {
    CAPTURE(scheme_name(s));
    const auto blocks = make_blocks(tri, s);
    const auto sol = solve_stokes(tri, blocks, 0.1, c.f(0.1), c.u());
    CHECK(kernels::max_abs(d * sol.velocity.values) <= 1e-12);
    for (const auto& m : blocks.pressure_means) {
      double mean = 0.0;
      for (const auto& [col, w] : m.row) mean += w * sol.pressure.values[col];
      CHECK(std::abs(mean) <= 1e-12);
    }
    CHECK(std::abs(integrate(tri, sol.pressure)) <= 1e-12);
  }
}

TEST_CASE("spurious velocity scales like 1/nu") {
  const auto tri = generate_structured(6);
  const auto& c = find_case("noflow-sin");
  for (auto s : {SchemeKind::CrP0, SchemeKind::TrioP0P1, SchemeKind::Mps}) {
    CAPTURE(scheme_name(s));
    const auto a = solve_stokes(tri, s, 1.0, c);
    const auto b = solve_stokes(tri, s, 1e-3, c);
    CHECK(velocity_norm(tri, b) / velocity_norm(tri, a) == doctest::Approx(1e3).epsilon(1e-8));
    double dp = 0.0;
    for (std::size_t i = 0; i < a.pressure.values.size(); ++i)
      dp = std::max(dp, std::abs(a.pressure.values[i] - b.pressure.values[i]));
    CHECK(dp <= 1e-8);
  }
}

TEST_CASE("Mps pressure reconstruction") {
  const auto& c = find_case("noflow-sin");
  double prev = 0.0;
  for (int n : {8, 16}) {
    const auto tri = generate_structured(n);
    const auto blocks = make_blocks(tri, SchemeKind::Mps);
    const auto sol = solve_stokes(tri, blocks, 1.0, c.f(1.0));
    const double rec = pressure_l2_error(tri, blocks, sol, c.p());
    const double p0 = l2_error(tri, sol.pressure, c.p());
    CHECK(rec < p0);
    if (prev > 0.0) CHECK(std::log2(prev / rec) >= 1.8);
    prev = rec;
  }
}

TEST_CASE("Trio on a mesh violating the corner hypothesis") {
  const auto tri = generate_structured(4, DiagonalMode::Uniform);
  const auto s = assemble_stokes(tri, SchemeKind::TrioP0P1, 1.0, find_case("noflow-sin").f(1.0));
  CHECK(s.warnings.size() == 1);
  CHECK_THROWS_AS(solve_stokes(tri, SchemeKind::TrioP0P1, 1.0, find_case("noflow-sin")), NumericalError);
  const auto repaired = repair_boundary_corners(tri);
  CHECK_NOTHROW(solve_stokes(repaired, SchemeKind::TrioP0P1, 1.0, find_case("noflow-sin")));
}

TEST_CASE("invalid viscosity") {
  const auto tri = generate_structured(2);
  CHECK_THROWS_AS(assemble_stokes(tri, SchemeKind::CrP0, 0.0, find_case("affine-p").f(1.0)), InvalidArgument);
}
