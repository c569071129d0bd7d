#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ncr/error.hpp"
#include "ncr/harness.hpp"

using namespace ncr;

namespace {

std::string csv_of(const std::vector<LevelResult>& rows) {
  std::ostringstream os;
  write_csv(rows, os);
  return os.str();
}

}  // namespace

TEST_CASE("order fitting") {
  SUBCASE("errors proportional to h^2") {
    const std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> e;
    for (double h : hs) e.push_back(3.7 * h * h);
    const auto fit = fit_eoc(e, hs);
    REQUIRE(fit.slope);
    CHECK(std::abs(*fit.slope - 2.0) <= 1e-12);
    CHECK(std::abs(*fit.endpoints - 2.0) <= 1e-12);
    CHECK_FALSE(fit.pairwise[0]);
    for (std::size_t i = 1; i < hs.size(); ++i) CHECK(std::abs(*fit.pairwise[i] - 2.0) <= 1e-12);
  }

  SUBCASE("single level") {
    const std::vector<double> e{0.3}, hs{0.1};
    const auto fit = fit_eoc(e, hs);
    CHECK(fit.pairwise.size() == 1);
    CHECK_FALSE(fit.pairwise[0]);
    CHECK_FALSE(fit.slope);
    CHECK_FALSE(fit.endpoints);
  }

  SUBCASE("tabulated superconvergent velocity errors") {
    // least squares gives 2.909; the tabulated 2.89 is the first-to-last slope
    const std::vector<double> e{1.59e-04, 1.78e-05, 2.10e-06, 3.91e-07}, hs{0.1, 0.05, 0.025, 0.0125};
    const auto fit = fit_eoc(e, hs);
    CHECK(*fit.slope == doctest::Approx(2.89).epsilon(0.01));
    CHECK(*fit.endpoints == doctest::Approx(2.89).epsilon(0.001));
    CHECK(*fit.pairwise[1] == doctest::Approx(std::log2(1.59e-04 / 1.78e-05)));
  }

  SUBCASE("floor suppresses orders") {
    const std::vector<double> e{1e-6, 1e-12, 1e-13}, hs{0.1, 0.05, 0.025};
    const auto fit = fit_eoc(e, hs);
    CHECK_FALSE(fit.pairwise[1]);
    CHECK_FALSE(fit.pairwise[2]);
    CHECK_FALSE(fit.slope);
  }

  CHECK_THROWS_AS(fit_eoc(std::vector<double>{1.0}, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("mesh selection") {
  const MeshSpec kershaw{MeshSpec::Family::Kershaw, DiagonalMode::Uniform, 0.6};
  CHECK_FALSE(validate(make_mesh(kershaw, 8, SchemeKind::CrP0)).hypothesis_41());
  CHECK(validate(make_mesh(kershaw, 8, SchemeKind::TrioP0P1)).hypothesis_41());
  CHECK(validate(make_mesh({}, 8, SchemeKind::Mps)).hypothesis_41());
}

TEST_CASE("convergence report") {
  const auto& c = find_case("sin-sin");
  HarnessOptions det;
  det.deterministic = true;
  const auto r = run_convergence(SchemeKind::CrP0, c, 1.0, {8, 4, 16}, det);
  REQUIRE(r.ok());
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].n == 4);
  CHECK(r.rows[2].n == 16);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].h < r.rows[i - 1].h);
  CHECK_FALSE(r.rows[0].eoc_u);
  CHECK(r.rows[1].eoc_u);
  CHECK(r.rows[2].ncells == 2 * 16 * 16);
  for (const auto& row : r.rows) CHECK(row.wall_ms == 0.0);
  REQUIRE(r.slope_u);
  CHECK(*r.slope_u > 1.5);

  // errors are relative to the exact norms on the finest level
  const auto tri = make_mesh({}, 16, SchemeKind::CrP0);
  const auto sol = solve_stokes(tri, SchemeKind::CrP0, 1.0, c);
  CHECK(r.rows[2].err_u == doctest::Approx(l2_error(tri, sol.velocity, c.u()) / l2_norm(tri, c.u())).epsilon(1e-14));

  SUBCASE("repeated deterministic runs are bitwise identical") {
    const auto again = run_convergence(SchemeKind::CrP0, c, 1.0, {4, 8, 16}, det);
    CHECK(csv_of(again.rows) == csv_of(r.rows));
  }

  SUBCASE("parallel levels give the same numbers") {
    HarnessOptions par;
    par.threads = 3;
    const auto p = run_convergence(SchemeKind::CrP0, c, 1.0, {4, 8, 16}, par);
    REQUIRE(p.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(p.rows[i].n == r.rows[i].n);
      CHECK(p.rows[i].err_u == r.rows[i].err_u);
      CHECK(p.rows[i].err_p == r.rows[i].err_p);
    }
  }
}

TEST_CASE("exact discrete solutions report no orders") {
  HarnessOptions det;
  det.deterministic = true;
  const auto r = run_convergence(SchemeKind::TrioP0P1, find_case("affine-p"), 1.0, {4, 8}, det);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.err_u <= kEocFloor);
    CHECK_FALSE(row.eoc_u);
  }
  CHECK_FALSE(r.slope_u);
}

TEST_CASE("failing levels are retained in the report") {
  HarnessOptions bad;
  bad.transient.t_max = -1.0;
  const auto r = run_convergence(SchemeKind::CrP0, find_case("green-taylor"), 1.0, {4, 8}, bad);
  CHECK(r.rows.empty());
  REQUIRE(r.failures.size() == 2);
  CHECK_FALSE(r.failures[0].numerical);
  CHECK(r.failures[0].n == 4);
  CHECK_THROWS_AS(run_convergence(SchemeKind::CrP0, find_case("green-taylor"), 1.0, {}), InvalidArgument);
  CHECK_THROWS_AS(run_convergence(SchemeKind::CrP0, find_case("affine-p"), -1.0, {4}), InvalidArgument);
}

TEST_CASE("viscosity sweep") {
  HarnessOptions det;
  det.deterministic = true;
  const std::vector<SchemeKind> schemes{SchemeKind::CrP0, SchemeKind::Mps};
  const auto r = run_viscosity_sweep(schemes, find_case("noflow-sin"), {1e-3, 1.0, 1e-1}, 10, det);
  REQUIRE(r.ok());
  REQUIRE(r.rows.size() == 6);
  CHECK(r.rows[0].nu == 1.0);
  CHECK(r.rows[2].nu == 1e-3);
  // spurious velocity grows like 1/nu from the start for every scheme here
  CHECK(r.rows[2].err_u / r.rows[0].err_u == doctest::Approx(1e3).epsilon(0.01));
  REQUIRE(r.tipping.size() == 2);
  CHECK(r.tipping[0].scheme == "crp0");
  REQUIRE(r.tipping[0].nu);
  CHECK(*r.tipping[0].nu == 1.0);

  // with a nonzero exact velocity the pressure-robust scheme never tips
  const auto robust = run_viscosity_sweep(std::vector<SchemeKind>{SchemeKind::Mps}, find_case("sin-affine-p"),
                                          {1.0, 1e-1, 1e-2, 1e-3}, 8, det);
  REQUIRE(robust.tipping.size() == 1);
  CHECK_FALSE(robust.tipping[0].nu);
}

TEST_CASE("csv round trip") {
  LevelResult a{"mps", "noflow-sin", 1.0, 10, 0.1, 200, 1.0 / 3.0, std::nextafter(0.2, 1.0), std::nullopt, 2.5, 0.0};
  LevelResult b{"trio", "sin-sin", 1e-3, 20, 0.05, 800, 1e-300, 5e-7, 4.000000000000001, std::nullopt, 12.75};
  const std::vector<LevelResult> rows{a, b};
  const auto text = csv_of(rows);
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(text.find(",,") != std::string::npos);

  std::istringstream in(text);
  const auto back = read_csv(in);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].scheme == rows[i].scheme);
    CHECK(back[i].case_name == rows[i].case_name);
    CHECK(back[i].nu == rows[i].nu);
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].h == rows[i].h);
    CHECK(back[i].ncells == rows[i].ncells);
    CHECK(back[i].err_u == rows[i].err_u);
    CHECK(back[i].err_p == rows[i].err_p);
    CHECK(back[i].eoc_u == rows[i].eoc_u);
    CHECK(back[i].eoc_p == rows[i].eoc_p);
    CHECK(back[i].wall_ms == rows[i].wall_ms);
  }
  CHECK(csv_of(back) == text);

  std::istringstream bad_header("scheme,case\n");
  CHECK_THROWS_AS(read_csv(bad_header), ParseError);
  std::istringstream bad_row(std::string(kCsvHeader) + "\nmps,x,1,2\n");
  CHECK_THROWS_AS(read_csv(bad_row), ParseError);
}
