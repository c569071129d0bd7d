#include "ncr/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <umfpack.h>

#include "ncr/error.hpp"
#include "ncr/kernels.hpp"

namespace ncr {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const CsrMatrix& a) {
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(a.nnz());
  for (std::int64_t r = 0; r < a.rows(); ++r)
    for (auto k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
      t.emplace_back(static_cast<int>(r), static_cast<int>(a.col_idx()[k]), a.values()[k]);
  EigenSparse m(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r = a * x;
  kernels::axpy(-1.0, b, r);
  return kernels::max_abs(r) / std::max(1.0, kernels::max_abs(b));
}

struct Factorization::Impl {
  FactorKind kind;
  // CSR storage of A read as CSC of A^T; solves use UMFPACK_At.
  void* numeric = nullptr;
  Eigen::SimplicialLDLT<EigenSparse> ldlt;
  ~Impl() {
    if (numeric) umfpack_dl_free_numeric(&numeric);
  }
};

Factorization::Factorization(const CsrMatrix& a, FactorKind kind) : a_(a), impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw InvalidArgument("factorization of a non-square matrix");
  impl_->kind = kind;
  if (a.rows() == 0) return;
  if (kind == FactorKind::LU) {
    const auto n = static_cast<SuiteSparse_long>(a.rows());
    static_assert(sizeof(SuiteSparse_long) == sizeof(std::int64_t));
    const auto* ap = reinterpret_cast<const SuiteSparse_long*>(a_.row_ptr().data());
    const auto* ai = reinterpret_cast<const SuiteSparse_long*>(a_.col_idx().data());
    double control[UMFPACK_CONTROL];
    double info[UMFPACK_INFO];
    umfpack_dl_defaults(control);
    void* symbolic = nullptr;
    SuiteSparse_long status = umfpack_dl_symbolic(n, n, ap, ai, a_.values().data(), &symbolic, control, info);
    if (status != UMFPACK_OK) throw SingularSystem("UMFPACK symbolic analysis failed, status " + std::to_string(status));
    status = umfpack_dl_numeric(ap, ai, a_.values().data(), symbolic, &impl_->numeric, control, info);
    umfpack_dl_free_symbolic(&symbolic);
    // rcond is min/max |diag U| of the row-scaled matrix
    const double rcond = info[UMFPACK_RCOND];
    if (status == UMFPACK_WARNING_singular_matrix || !(rcond > 1e-14)) {
      std::ostringstream os;
      os << "LU pivot ratio " << rcond << " below 1e-14";
      throw SingularSystem(os.str());
    }
    if (status != UMFPACK_OK) throw SingularSystem("UMFPACK factorization failed, status " + std::to_string(status));
  } else {
    impl_->ldlt.compute(to_eigen(a));
    if (impl_->ldlt.info() != Eigen::Success) throw SingularSystem("sparse LDLT failed");
    const double tiny = 1e-14 * a.max_abs();
    const auto d = impl_->ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (!(d[i] > tiny)) throw SingularSystem("matrix is not positive definite");
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

std::vector<double> Factorization::solve(std::span<const double> b, double tolerance) const {
  if (static_cast<std::int64_t>(b.size()) != a_.rows()) throw InvalidArgument("solve: rhs size mismatch");
  std::vector<double> x(b.size());
  if (b.empty()) return x;
  Eigen::Map<const Eigen::VectorXd> bb(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::Map<Eigen::VectorXd> xx(x.data(), static_cast<Eigen::Index>(x.size()));
  if (impl_->kind == FactorKind::LU) {
    const auto* ap = reinterpret_cast<const SuiteSparse_long*>(a_.row_ptr().data());
    const auto* ai = reinterpret_cast<const SuiteSparse_long*>(a_.col_idx().data());
    const SuiteSparse_long status = umfpack_dl_solve(UMFPACK_At, ap, ai, a_.values().data(), x.data(), b.data(),
                                                     impl_->numeric, nullptr, nullptr);
    if (status != UMFPACK_OK) throw SingularSystem("UMFPACK solve failed, status " + std::to_string(status));
  } else {
    xx = impl_->ldlt.solve(bb);
  }
  for (double v : x)
    if (!std::isfinite(v)) throw SingularSystem("solve produced non-finite values");
  const double res = relative_residual(a_, x, b);
  if (!(res <= tolerance)) {
    std::ostringstream os;
    os << "relative residual " << res << " exceeds " << tolerance << " (" << a_.rows() << " unknowns)";
    throw ResidualTooLarge(os.str());
  }
  return x;
}

std::vector<double> direct_solve(const CsrMatrix& a, std::span<const double> b, double tolerance) {
  return Factorization(a).solve(b, tolerance);
}

CsrMatrix border(const CsrMatrix& a, const std::vector<Constraint>& constraints) {
  if (a.rows() != a.cols()) throw InvalidArgument("border: matrix must be square");
  const std::int64_t n = a.rows();
  auto t = a.triplets();
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const std::int64_t r = n + static_cast<std::int64_t>(k);
    for (const auto& [col, v] : constraints[k].row) {
      if (col < 0 || col >= n) throw InvalidArgument("constraint column out of range");
      t.push_back({r, col, v});
      t.push_back({col, r, v});
    }
  }
  const std::int64_t m = n + static_cast<std::int64_t>(constraints.size());
  return compress(m, m, std::move(t));
}

struct BorderedFactorization::Impl {
  std::vector<Constraint> cons;
  std::vector<std::int64_t> pick;
  std::optional<Factorization> fac;
  std::vector<std::vector<double>> we, wc;
  Eigen::FullPivLU<Eigen::MatrixXd> small;
  CsrMatrix bordered;
};

BorderedFactorization::BorderedFactorization(const CsrMatrix& a, std::vector<Constraint> constraints)
    : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw InvalidArgument("bordered factorization of a non-square matrix");
  auto& d = *impl_;
  const std::int64_t n = a.rows();
  const std::size_t k = constraints.size();
  d.bordered = border(a, constraints);
  d.cons = std::move(constraints);
  if (k == 0) {
    d.fac.emplace(a);
    return;
  }

  // Dense constraint rows ruin fill-reducing orderings. Factor instead the
  // sparse A + alpha E E^T, where E picks one column per constraint, and
  // recover the bordered solution from a 2k x 2k correction:
  //   x = At^{-1} (b + alpha E s - C lambda),  s = E^T x,  C^T x = r.
  d.pick.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& row = d.cons[i].row;
    auto it = std::max_element(row.begin(), row.end(),
                               [](const auto& x, const auto& y) { return std::abs(x.second) < std::abs(y.second); });
    if (it == row.end() || it->second == 0.0) throw InvalidArgument("empty constraint row");
    d.pick[i] = it->first;
  }
  const double alpha = std::max(1.0, a.max_abs());
  auto t = a.triplets();
  for (auto p : d.pick) t.push_back({p, p, alpha});
  d.fac.emplace(compress(n, n, std::move(t)));

  d.we.resize(k);
  d.wc.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> e(n, 0.0);
    e[d.pick[i]] = alpha;
    d.we[i] = solve_unchecked(e);
    std::vector<double> c(n, 0.0);
    for (const auto& [col, v] : d.cons[i].row) c[col] += v;
    d.wc[i] = solve_unchecked(c);
  }
  // unknowns (s_1..s_k, lambda_1..lambda_k)
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      m(i, j) = d.we[j][d.pick[i]] - (i == j ? 1.0 : 0.0);
      m(i, k + j) = -d.wc[j][d.pick[i]];
      m(k + i, j) = constraint_dot(i, d.we[j]);
      m(k + i, k + j) = -constraint_dot(i, d.wc[j]);
    }
  d.small.compute(m);
  if (!d.small.isInvertible()) throw SingularSystem("constraint correction system is singular");
}

BorderedFactorization::~BorderedFactorization() = default;
BorderedFactorization::BorderedFactorization(BorderedFactorization&&) noexcept = default;
BorderedFactorization& BorderedFactorization::operator=(BorderedFactorization&&) noexcept = default;

std::int64_t BorderedFactorization::size() const { return impl_->fac->size(); }

std::vector<double> BorderedFactorization::solve_unchecked(const std::vector<double>& b) const {
  // residual is checked once on the bordered system
  return impl_->fac->solve(b, std::numeric_limits<double>::infinity());
}

double BorderedFactorization::constraint_dot(std::size_t i, const std::vector<double>& v) const {
  double s = 0.0;
  for (const auto& [col, w] : impl_->cons[i].row) s += w * v[col];
  return s;
}

BorderedSolution BorderedFactorization::solve(std::span<const double> rhs, std::span<const double> constraint_rhs,
                                              double tolerance) const {
  const auto& d = *impl_;
  const std::size_t k = d.cons.size();
  if (static_cast<std::int64_t>(rhs.size()) != size()) throw InvalidArgument("rhs size mismatch");
  if (constraint_rhs.size() != k) throw InvalidArgument("constraint rhs size mismatch");

  BorderedSolution out;
  out.x = solve_unchecked(std::vector<double>(rhs.begin(), rhs.end()));
  if (k > 0) {
    Eigen::VectorXd r(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
      r[i] = -out.x[d.pick[i]];
      r[k + i] = constraint_rhs[i] - constraint_dot(i, out.x);
    }
    const Eigen::VectorXd sl = d.small.solve(r);
    for (std::size_t j = 0; j < k; ++j) {
      kernels::axpy(sl[j], d.we[j], out.x);
      kernels::axpy(-sl[k + j], d.wc[j], out.x);
      out.multipliers.push_back(sl[k + j]);
    }
  }
  std::vector<double> full = out.x;
  full.insert(full.end(), out.multipliers.begin(), out.multipliers.end());
  for (double v : full)
    if (!std::isfinite(v)) throw SingularSystem("bordered solve produced non-finite values");
  std::vector<double> full_rhs(rhs.begin(), rhs.end());
  full_rhs.insert(full_rhs.end(), constraint_rhs.begin(), constraint_rhs.end());
  const double res = relative_residual(d.bordered, full, full_rhs);
  if (!(res <= tolerance)) {
    std::ostringstream os;
    os << "relative residual " << res << " exceeds " << tolerance << " (" << d.bordered.rows() << " unknowns)";
    throw ResidualTooLarge(os.str());
  }
  return out;
}

BorderedSolution solve_bordered(const LinearSystem& system, double tolerance) {
  if (system.rhs.size() != static_cast<std::size_t>(system.matrix.rows())) throw InvalidArgument("rhs size mismatch");
  std::vector<double> cr;
  for (const auto& c : system.constraints) cr.push_back(c.rhs);
  return BorderedFactorization(system.matrix, system.constraints).solve(system.rhs, cr, tolerance);
}

}  // namespace ncr
