#pragma once

// Dense and sparse vector kernels with a scalar reference path and an AVX2
// path chosen at runtime. Set NCR_SIMD=scalar to force the reference path.

#include <cstdint>
#include <span>
#include <string_view>

namespace ncr::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
/// Overrides the runtime choice; requesting Avx2 on a CPU without it throws.
void set_isa(Isa isa);
bool avx2_available();
std::string_view isa_name(Isa isa);

struct CsrView {
  std::int64_t rows;
  const std::int64_t* row_ptr;
  const std::int64_t* col_idx;
  const double* values;
};

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double max_abs(std::span<const double> x);
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
void spmv(const CsrView& a, const double* x, double* y);
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
void spmv(const CsrView& a, const double* x, double* y);
}  // namespace avx2

}  // namespace ncr::kernels
