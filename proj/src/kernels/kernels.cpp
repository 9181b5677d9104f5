#include "hmlab/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace hmlab::kern {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Ops* select() {
  const Ops* vec = avx2_ops();
  const char* pref = std::getenv("HMLAB_KERNELS");
  if (pref != nullptr) {
    if (std::strcmp(pref, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(pref, "avx2") == 0 && vec && cpu_has_avx2()) return vec;
    return &scalar_ops();
  }
  if (vec && cpu_has_avx2()) return vec;
  return &scalar_ops();
}

}  // namespace

const Ops& ops() {
  static const Ops* active = select();
  return *active;
}

}  // namespace hmlab::kern
