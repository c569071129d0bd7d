#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ncr/error.hpp"
#include "ncr/kernels.hpp"
#include "ncr/linalg.hpp"
#include "ncr/sparse.hpp"

using namespace ncr;

TEST_CASE("compress sums duplicates") {
  auto a = compress(1, 1, {{0, 0, 1.0}, {0, 0, 2.0}});
  CHECK(a.nnz() == 1);
  CHECK(a.coeff(0, 0) == 3.0);
  auto z = compress(3, 4, {});
  CHECK(z.nnz() == 0);
  std::vector<double> x(4, 1.0);
  CHECK((z * x) == std::vector<double>(3, 0.0));
  CHECK_THROWS_AS(compress(2, 2, {{2, 0, 1.0}}), InvalidArgument);
}

TEST_CASE("random triplets match a dense accumulation oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> idx(0, 49);
  std::uniform_real_distribution<double> val(-1, 1);
  std::vector<Triplet> t;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(50, 50);
  for (int k = 0; k < 600; ++k) {
    int r = idx(rng), c = idx(rng);
    double v = val(rng);
    t.push_back({r, c, v});
    dense(r, c) += v;
  }
  auto a = compress(50, 50, t);
  std::vector<double> x(50);
  for (auto& v : x) v = val(rng);
  auto y = a * x;
  Eigen::VectorXd yd = dense * Eigen::Map<Eigen::VectorXd>(x.data(), 50);
  for (int i = 0; i < 50; ++i) CHECK(std::abs(y[i] - yd[i]) <= 1e-13);
  auto yt = a.multiply_transposed(x);
  Eigen::VectorXd ytd = dense.transpose() * Eigen::Map<Eigen::VectorXd>(x.data(), 50);
  for (int i = 0; i < 50; ++i) CHECK(std::abs(yt[i] - ytd[i]) <= 1e-13);
  CHECK(max_abs_difference(a.transposed().transposed(), a) == 0.0);
}

TEST_CASE("direct solve small systems") {
  auto id = compress(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
  std::vector<double> b{1, 2, 3};
  CHECK(direct_solve(id, b) == b);
  auto d = compress(2, 2, {{0, 0, 2}, {1, 1, 4}});
  auto x = direct_solve(d, std::vector<double>{2, 8});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));
  auto sing = compress(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
  CHECK_THROWS_AS(direct_solve(sing, std::vector<double>{1, 2}), NumericalError);
}

TEST_CASE("random SPD system matches dense Cholesky") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-1, 1);
  Eigen::MatrixXd r(100, 100);
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) r(i, j) = val(rng);
  Eigen::MatrixXd spd = r.transpose() * r + 100.0 * Eigen::MatrixXd::Identity(100, 100);
  std::vector<Triplet> t;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) t.push_back({i, j, spd(i, j)});
  auto a = compress(100, 100, t);
  std::vector<double> b(100);
  for (auto& v : b) v = val(rng);
  Eigen::VectorXd ref = spd.llt().solve(Eigen::Map<Eigen::VectorXd>(b.data(), 100));
  for (auto kind : {FactorKind::LU, FactorKind::LDLT}) {
    auto x = Factorization(a, kind).solve(b);
    for (int i = 0; i < 100; ++i) CHECK(std::abs(x[i] - ref[i]) <= 1e-10);
  }
}

TEST_CASE("bordered solve enforces a constraint") {
  // Laplacian with a constant kernel on a 4-cycle, closed by zero mean
  std::vector<Triplet> t;
  for (int i = 0; i < 4; ++i) {
    t.push_back({i, i, 2.0});
    t.push_back({i, (i + 1) % 4, -1.0});
    t.push_back({i, (i + 3) % 4, -1.0});
  }
  LinearSystem sys;
  sys.matrix = compress(4, 4, t);
  sys.rhs = {1, -1, 1, -1};
  sys.constraints.push_back({{{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, 0.0});
  auto s = solve_bordered(sys);
  CHECK(std::abs(s.x[0] + s.x[1] + s.x[2] + s.x[3]) <= 1e-14);
  CHECK(s.x[0] == doctest::Approx(0.25));
  CHECK(std::abs(s.multipliers[0]) <= 1e-14);
  CHECK_THROWS_AS(direct_solve(sys.matrix, sys.rhs), NumericalError);
}

TEST_CASE("scalar and AVX2 kernels agree") {
  if (!kernels::avx2_available()) return;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-1, 1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 1000u}) {
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = val(rng);
    for (auto& v : y) v = val(rng);
    const double ds = kernels::scalar::dot(x.data(), y.data(), n);
    const double dv = kernels::avx2::dot(x.data(), y.data(), n);
    CHECK(std::abs(ds - dv) <= 1e-13 * (1.0 + n));
    CHECK(kernels::scalar::max_abs(x.data(), n) == kernels::avx2::max_abs(x.data(), n));
    auto y1 = y, y2 = y;
    kernels::scalar::axpy(0.3, x.data(), y1.data(), n);
    kernels::avx2::axpy(0.3, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));
  }
  std::uniform_int_distribution<int> idx(0, 199);
  std::vector<Triplet> t;
  for (int k = 0; k < 3000; ++k) t.push_back({idx(rng), idx(rng), val(rng)});
  auto a = compress(200, 200, t);
  std::vector<double> x(200), y1(200), y2(200);
  for (auto& v : x) v = val(rng);
  kernels::CsrView view{a.rows(), a.row_ptr().data(), a.col_idx().data(), a.values().data()};
  kernels::scalar::spmv(view, x.data(), y1.data());
  kernels::avx2::spmv(view, x.data(), y2.data());
  for (int i = 0; i < 200; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-13);

  const auto saved = kernels::active_isa();
  kernels::set_isa(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  kernels::set_isa(saved);
}
