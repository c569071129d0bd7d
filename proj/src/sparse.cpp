#include "ncr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncr/error.hpp"
#include "ncr/kernels.hpp"

namespace ncr {

CsrMatrix compress(std::int64_t rows, std::int64_t cols, std::vector<Triplet> triplets) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative matrix shape");
  for (const auto& t : triplets)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw InvalidArgument("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                            ") outside " + std::to_string(rows) + " x " + std::to_string(cols));
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size();) {
    const auto r = triplets[i].row, c = triplets[i].col;
    double v = 0.0;
    for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i)
      v += triplets[i].value;
    m.col_idx_.push_back(c);
    m.values_.push_back(v);
    ++m.row_ptr_[r + 1];
  }
  for (std::int64_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<std::int64_t>(x.size()) != cols_ || static_cast<std::int64_t>(y.size()) != rows_)
    throw InvalidArgument("CsrMatrix::multiply: size mismatch");
  kernels::spmv({rows_, row_ptr_.data(), col_idx_.data(), values_.data()}, x, y);
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

std::vector<double> CsrMatrix::multiply_transposed(std::span<const double> x) const {
  if (static_cast<std::int64_t>(x.size()) != rows_)
    throw InvalidArgument("CsrMatrix::multiply_transposed: size mismatch");
  std::vector<double> y(cols_, 0.0);
  for (std::int64_t r = 0; r < rows_; ++r)
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * x[r];
  return y;
}

double CsrMatrix::coeff(std::int64_t r, std::int64_t c) const {
  const auto b = col_idx_.begin() + row_ptr_[r], e = col_idx_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(b, e, c);
  return (it != e && *it == c) ? values_[it - col_idx_.begin()] : 0.0;
}

CsrMatrix CsrMatrix::transposed() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::int64_t r = 0; r < rows_; ++r)
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({col_idx_[k], r, values_[k]});
  return compress(cols_, rows_, std::move(t));
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Triplet> CsrMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::int64_t r = 0; r < rows_; ++r)
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({r, col_idx_[k], values_[k]});
  return t;
}

double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("max_abs_difference: shape mismatch");
  auto t = a.triplets();
  for (auto s : b.triplets()) t.push_back({s.row, s.col, -s.value});
  return compress(a.rows(), a.cols(), std::move(t)).max_abs();
}

CsrMatrix submatrix(const CsrMatrix& a, std::span<const std::int64_t> row_map,
                    std::span<const std::int64_t> col_map) {
  std::vector<std::int64_t> col_inv(a.cols(), -1);
  for (std::size_t j = 0; j < col_map.size(); ++j) col_inv.at(col_map[j]) = static_cast<std::int64_t>(j);
  std::vector<Triplet> t;
  const auto& rp = a.row_ptr();
  for (std::size_t i = 0; i < row_map.size(); ++i) {
    const auto r = row_map[i];
    for (auto k = rp.at(r); k < rp[r + 1]; ++k) {
      const auto j = col_inv[a.col_idx()[k]];
      if (j >= 0) t.push_back({static_cast<std::int64_t>(i), j, a.values()[k]});
    }
  }
  return compress(static_cast<std::int64_t>(row_map.size()), static_cast<std::int64_t>(col_map.size()),
                  std::move(t));
}

}  // namespace ncr
