#include <cstdlib>
#include <string>

#include "epath/simd.hpp"

namespace epath::simd {

const KernelTable& active() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    if (const char* env = std::getenv("EPATH_SIMD"); env && std::string(env) == "scalar") {
      return scalar_kernels();
    }
    if (const KernelTable* avx2 = avx2_kernels(); avx2 && cpu_has_avx2()) return *avx2;
    return scalar_kernels();
  }();
  return chosen;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace epath::simd
