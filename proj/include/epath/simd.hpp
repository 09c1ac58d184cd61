#pragma once
// Data-parallel inner loops with a portable scalar reference and an AVX2
// variant chosen once per process. Every kernel's AVX2 path is checked
// against the scalar path in tests/test_simd.cpp.
//
// Set EPATH_SIMD=scalar in the environment to force the reference kernels.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace epath::simd {

enum class Isa { Scalar, Avx2 };

/// One table entry per kernel; filled by a backend.
struct KernelTable {
  Isa isa;

  /// One lightlike hop of the chessboard transfer operator on a
  /// position-resolved state. For every output cell p in [0, size):
  ///   right_out[p] = right_in[p-1] + i*a*left_in[p-1]
  ///   left_out[p]  = left_in[p+1]  + i*a*right_in[p+1]
  /// with out-of-range neighbours treated as zero. Arrays are split real/imag.
  void (*transfer_step)(std::size_t size, double a, const double* r_re, const double* r_im,
                        const double* l_re, const double* l_im, double* out_r_re, double* out_r_im,
                        double* out_l_re, double* out_l_im);

  /// dst[i] += src[i]
  void (*add_i32)(std::size_t size, std::int32_t* dst, const std::int32_t* src);

  /// Sum of a[i]*b[i]. Partial sums are combined in a fixed order per backend.
  double (*dot)(std::size_t size, const double* a, const double* b);
};

const KernelTable& scalar_kernels();
/// nullptr when the backend was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_has_avx2();

/// The process-wide table: AVX2 when compiled in, supported by the CPU and
/// not overridden by EPATH_SIMD=scalar.
const KernelTable& active();

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.size() < b.size() ? a.size() : b.size(), a.data(), b.data());
}

inline void add_into(std::span<std::int32_t> dst, std::span<const std::int32_t> src) {
  active().add_i32(dst.size() < src.size() ? dst.size() : src.size(), dst.data(), src.data());
}

}  // namespace epath::simd
