#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "epath/simd.hpp"

using namespace epath::simd;

namespace {

std::vector<double> random_doubles(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar transfer_step matches its definition") {
  const std::vector<double> r_re{1, 2, 3, 4}, r_im{0, 1, 0, 1}, l_re{5, 6, 7, 8}, l_im{1, 0, 1, 0};
  std::vector<double> o_rre(4), o_rim(4), o_lre(4), o_lim(4);
  const double a = 0.5;
  scalar_kernels().transfer_step(4, a, r_re.data(), r_im.data(), l_re.data(), l_im.data(),
                                 o_rre.data(), o_rim.data(), o_lre.data(), o_lim.data());
  // right_out[p] = right_in[p-1] + i a left_in[p-1]
  CHECK(o_rre[0] == 0.0);
  CHECK(o_rim[0] == 0.0);
  CHECK(o_rre[2] == r_re[1] - a * l_im[1]);
  CHECK(o_rim[2] == r_im[1] + a * l_re[1]);
  // left_out[p] = left_in[p+1] + i a right_in[p+1]
  CHECK(o_lre[3] == 0.0);
  CHECK(o_lre[1] == l_re[2] - a * r_im[2]);
  CHECK(o_lim[1] == l_im[2] + a * r_re[2]);
}

TEST_CASE("scalar add_i32 and dot") {
  std::vector<std::int32_t> d{1, -2, 3}, s{4, 5, -6};
  scalar_kernels().add_i32(3, d.data(), s.data());
  CHECK(d == std::vector<std::int32_t>{5, 3, -3});
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 2, 2, 2, 2};
  CHECK(scalar_kernels().dot(5, a.data(), b.data()) == 30.0);
  CHECK(scalar_kernels().dot(0, a.data(), b.data()) == 0.0);
}

TEST_CASE("AVX2 kernels are bitwise equal to the scalar reference") {
  const KernelTable* avx = avx2_kernels();
  if (avx == nullptr || !cpu_has_avx2()) {
    MESSAGE("AVX2 backend unavailable on this host; equivalence not exercised");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 257u, 1000u}) {
    CAPTURE(n);
    const auto r_re = random_doubles(n, rng), r_im = random_doubles(n, rng);
    const auto l_re = random_doubles(n, rng), l_im = random_doubles(n, rng);
    const double a = 0.37;
    std::vector<double> s[4], v[4];
    for (int k = 0; k < 4; ++k) {
      s[k].assign(n, 0.0);
      v[k].assign(n, 0.0);
    }
    ref.transfer_step(n, a, r_re.data(), r_im.data(), l_re.data(), l_im.data(), s[0].data(),
                      s[1].data(), s[2].data(), s[3].data());
    avx->transfer_step(n, a, r_re.data(), r_im.data(), l_re.data(), l_im.data(), v[0].data(),
                       v[1].data(), v[2].data(), v[3].data());
    for (int k = 0; k < 4; ++k) CHECK(bitwise_equal(s[k], v[k]));

    std::uniform_int_distribution<std::int32_t> idist(-1000000, 1000000);
    std::vector<std::int32_t> d1(n), d2, src(n);
    for (auto& x : d1) x = idist(rng);
    for (auto& x : src) x = idist(rng);
    d2 = d1;
    ref.add_i32(n, d1.data(), src.data());
    avx->add_i32(n, d2.data(), src.data());
    CHECK(d1 == d2);

    const double ds = ref.dot(n, r_re.data(), l_im.data());
    const double dv = avx->dot(n, r_re.data(), l_im.data());
    CHECK(std::memcmp(&ds, &dv, sizeof ds) == 0);
  }
}

TEST_CASE("active table honours the backend name") {
  const auto name = isa_name(active().isa);
  CHECK((name == "scalar" || name == "avx2"));
}
