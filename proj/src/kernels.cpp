#include "qtraj/kernels.hpp"

#include <cstdlib>
#include <string>

namespace qtraj::kernels {
namespace {

const Ops* pick_default() {
#if defined(QTRAJ_HAVE_AVX2)
  if (avx2_supported()) return &avx2_ops();
#endif
  return &scalar_ops();
}

const Ops* resolve(std::string_view name) {
  if (name == "scalar") return &scalar_ops();
#if defined(QTRAJ_HAVE_AVX2)
  if (name == "avx2" && avx2_supported()) return &avx2_ops();
#endif
  if (name == "auto") return pick_default();
  return nullptr;
}

const Ops* initial() {
  if (const char* env = std::getenv("QTRAJ_KERNELS")) {
    if (const Ops* ops = resolve(env)) return ops;
  }
  return pick_default();
}

const Ops*& slot() {
  static const Ops* active = initial();
  return active;
}

}  // namespace

const Ops& active() { return *slot(); }

bool select(std::string_view name) {
  const Ops* ops = resolve(name);
  if (!ops) return false;
  slot() = ops;
  return true;
}

}  // namespace qtraj::kernels
