#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ncr {

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

/// Compressed sparse row operator. Column indices are sorted within each row
/// and unique.
class CsrMatrix {
public:
  CsrMatrix() = default;
  CsrMatrix(std::int64_t rows, std::int64_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::int64_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  /// y = A^T x
  std::vector<double> multiply_transposed(std::span<const double> x) const;

  double coeff(std::int64_t r, std::int64_t c) const;
  CsrMatrix transposed() const;
  double max_abs() const;

  std::vector<Triplet> triplets() const;

  friend CsrMatrix compress(std::int64_t rows, std::int64_t cols, std::vector<Triplet> triplets);

private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int64_t> col_idx_;
  std::vector<double> values_;
};

/// Sums duplicate (row, col) entries; rows and columns come out sorted.
/// Throws InvalidArgument on indices outside [0, rows) x [0, cols).
CsrMatrix compress(std::int64_t rows, std::int64_t cols, std::vector<Triplet> triplets);

/// Max-norm of A - B (shapes must agree).
double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b);

/// Selects rows and columns: result(i, j) = A(row_map[i], col_map[j]).
CsrMatrix submatrix(const CsrMatrix& a, std::span<const std::int64_t> row_map,
                    std::span<const std::int64_t> col_map);

}  // namespace ncr
