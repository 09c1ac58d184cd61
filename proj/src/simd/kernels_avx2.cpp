#include "epath/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define EPATH_HAVE_AVX2_BACKEND 1
#include <immintrin.h>
#else
#define EPATH_HAVE_AVX2_BACKEND 0
#endif

namespace epath::simd {

#if EPATH_HAVE_AVX2_BACKEND
namespace {

#define EPATH_AVX2 __attribute__((target("avx2")))

EPATH_AVX2 void transfer_step_avx2(std::size_t size, double a, const double* r_re,
                                   const double* r_im, const double* l_re, const double* l_im,
                                   double* out_r_re, double* out_r_im, double* out_l_re,
                                   double* out_l_im) {
  if (size == 0) return;
  const __m256d va = _mm256_set1_pd(a);

  // Right movers read from p-1.
  out_r_re[0] = 0.0;
  out_r_im[0] = 0.0;
  std::size_t p = 1;
  for (; p + 4 <= size; p += 4) {
    const __m256d rre = _mm256_loadu_pd(r_re + p - 1);
    const __m256d rim = _mm256_loadu_pd(r_im + p - 1);
    const __m256d lre = _mm256_loadu_pd(l_re + p - 1);
    const __m256d lim = _mm256_loadu_pd(l_im + p - 1);
    _mm256_storeu_pd(out_r_re + p, _mm256_sub_pd(rre, _mm256_mul_pd(va, lim)));
    _mm256_storeu_pd(out_r_im + p, _mm256_add_pd(rim, _mm256_mul_pd(va, lre)));
  }
  for (; p < size; ++p) {
    out_r_re[p] = r_re[p - 1] - a * l_im[p - 1];
    out_r_im[p] = r_im[p - 1] + a * l_re[p - 1];
  }

  // Left movers read from p+1.
  p = 0;
  for (; p + 5 <= size; p += 4) {
    const __m256d rre = _mm256_loadu_pd(r_re + p + 1);
    const __m256d rim = _mm256_loadu_pd(r_im + p + 1);
    const __m256d lre = _mm256_loadu_pd(l_re + p + 1);
    const __m256d lim = _mm256_loadu_pd(l_im + p + 1);
    _mm256_storeu_pd(out_l_re + p, _mm256_sub_pd(lre, _mm256_mul_pd(va, rim)));
    _mm256_storeu_pd(out_l_im + p, _mm256_add_pd(lim, _mm256_mul_pd(va, rre)));
  }
  for (; p + 1 < size; ++p) {
    out_l_re[p] = l_re[p + 1] - a * r_im[p + 1];
    out_l_im[p] = l_im[p + 1] + a * r_re[p + 1];
  }
  out_l_re[size - 1] = 0.0;
  out_l_im[size - 1] = 0.0;
}

EPATH_AVX2 void add_i32_avx2(std::size_t size, std::int32_t* dst, const std::int32_t* src) {
  std::size_t i = 0;
  for (; i + 8 <= size; i += 8) {
    const __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_add_epi32(d, s));
  }
  for (; i < size; ++i) dst[i] += src[i];
}

EPATH_AVX2 double dot_avx2(std::size_t size, const double* a, const double* b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= size; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  // [s0+s2, s1+s3] then the two halves.
  const __m128d pair = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double total = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
  for (; i < size; ++i) total += a[i] * b[i];
  return total;
}

#undef EPATH_AVX2

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::Avx2, &transfer_step_avx2, &add_i32_avx2, &dot_avx2};
  return &table;
}

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

#else

const KernelTable* avx2_kernels() { return nullptr; }
bool cpu_has_avx2() { return false; }

#endif

}  // namespace epath::simd
