#include "ncr/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "ncr/error.hpp"

namespace ncr::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

void spmv(const CsrView& a, const double* x, double* y) {
  for (std::int64_t r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (auto k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
    y[r] = s;
  }
}

}  // namespace scalar

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

namespace {

Isa initial_isa() {
  const char* env = std::getenv("NCR_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) throw InvalidArgument("AVX2 not supported on this CPU");
  current().store(isa);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("dot: size mismatch");
  return active_isa() == Isa::Avx2 ? avx2::dot(x.data(), y.data(), x.size())
                                   : scalar::dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InvalidArgument("axpy: size mismatch");
  if (active_isa() == Isa::Avx2)
    avx2::axpy(alpha, x.data(), y.data(), x.size());
  else
    scalar::axpy(alpha, x.data(), y.data(), x.size());
}

double max_abs(std::span<const double> x) {
  return active_isa() == Isa::Avx2 ? avx2::max_abs(x.data(), x.size())
                                   : scalar::max_abs(x.data(), x.size());
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<std::int64_t>(y.size()) != a.rows) throw InvalidArgument("spmv: size mismatch");
  if (active_isa() == Isa::Avx2)
    avx2::spmv(a, x.data(), y.data());
  else
    scalar::spmv(a, x.data(), y.data());
}

}  // namespace ncr::kernels
