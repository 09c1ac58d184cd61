#include "epath/simd.hpp"

namespace epath::simd {
namespace {

void transfer_step_scalar(std::size_t size, double a, const double* r_re, const double* r_im,
                          const double* l_re, const double* l_im, double* out_r_re,
                          double* out_r_im, double* out_l_re, double* out_l_im) {
  if (size == 0) return;
  out_r_re[0] = 0.0;
  out_r_im[0] = 0.0;
  for (std::size_t p = 1; p < size; ++p) {
    out_r_re[p] = r_re[p - 1] - a * l_im[p - 1];
    out_r_im[p] = r_im[p - 1] + a * l_re[p - 1];
  }
  for (std::size_t p = 0; p + 1 < size; ++p) {
    out_l_re[p] = l_re[p + 1] - a * r_im[p + 1];
    out_l_im[p] = l_im[p + 1] + a * r_re[p + 1];
  }
  out_l_re[size - 1] = 0.0;
  out_l_im[size - 1] = 0.0;
}

void add_i32_scalar(std::size_t size, std::int32_t* dst, const std::int32_t* src) {
  for (std::size_t i = 0; i < size; ++i) dst[i] += src[i];
}

// Four interleaved accumulators, combined as (s0+s1)+(s2+s3): the same
// association the AVX2 variant uses, so both backends agree bitwise.
double dot_scalar(std::size_t size, const double* a, const double* b) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= size; i += 4) {
    s[0] += a[i] * b[i];
    s[1] += a[i + 1] * b[i + 1];
    s[2] += a[i + 2] * b[i + 2];
    s[3] += a[i + 3] * b[i + 3];
  }
  double total = (s[0] + s[2]) + (s[1] + s[3]);
  for (; i < size; ++i) total += a[i] * b[i];
  return total;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, &transfer_step_scalar, &add_i32_scalar, &dot_scalar};
  return table;
}

}  // namespace epath::simd
