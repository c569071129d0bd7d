#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "ncr/sparse.hpp"

namespace ncr {

inline constexpr double kResidualTolerance = 1e-10;

/// Extra equation c·x = rhs appended to a square system by Lagrange bordering.
struct Constraint {
  std::vector<std::pair<std::int64_t, double>> row;
  double rhs = 0.0;
};

struct LinearSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::vector<Constraint> constraints;
};

struct BorderedSolution {
  std::vector<double> x;
  std::vector<double> multipliers;
};

enum class FactorKind { LU, LDLT };

/// Sparse direct factorization. LU uses partial pivoting with a fill-reducing
/// column ordering; LDLT requires a symmetric positive definite matrix.
class Factorization {
public:
  explicit Factorization(const CsrMatrix& a, FactorKind kind = FactorKind::LU);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  /// Solves and checks ||Ax - b||_inf / max(1, ||b||_inf) <= tolerance.
  std::vector<double> solve(std::span<const double> b, double tolerance = kResidualTolerance) const;
  std::int64_t size() const { return a_.rows(); }
  const CsrMatrix& matrix() const { return a_; }

private:
  struct Impl;
  CsrMatrix a_;
  std::unique_ptr<Impl> impl_;
};

/// One-shot LU solve with the residual check.
std::vector<double> direct_solve(const CsrMatrix& a, std::span<const double> b,
                                 double tolerance = kResidualTolerance);

/// [A C^T; C 0]
CsrMatrix border(const CsrMatrix& a, const std::vector<Constraint>& constraints);

/// Reusable factorization of [A C^T; C 0].
class BorderedFactorization {
public:
  BorderedFactorization(const CsrMatrix& a, std::vector<Constraint> constraints);
  ~BorderedFactorization();
  BorderedFactorization(BorderedFactorization&&) noexcept;
  BorderedFactorization& operator=(BorderedFactorization&&) noexcept;

  /// The rhs stored inside the constraints is ignored; `constraint_rhs` is used.
  BorderedSolution solve(std::span<const double> rhs, std::span<const double> constraint_rhs,
                         double tolerance = kResidualTolerance) const;
  std::int64_t size() const;

private:
  std::vector<double> solve_unchecked(const std::vector<double>& b) const;
  double constraint_dot(std::size_t i, const std::vector<double>& v) const;

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Solve of the bordered system.
BorderedSolution solve_bordered(const LinearSystem& system, double tolerance = kResidualTolerance);

/// ||Ax - b||_inf / max(1, ||b||_inf)
double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace ncr
