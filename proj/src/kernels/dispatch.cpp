#include "posecal/kernels.hpp"

#include <cstdlib>

#include "posecal/errors.hpp"
#include "tables.hpp"

namespace posecal::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(POSECAL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Impl default_impl() {
  if (const char* env = std::getenv("POSECAL_SIMD")) {
    std::string name(env);
    if (name == "scalar") return Impl::Scalar;
    if (name == "avx2") {
      if (!available(Impl::Avx2)) {
        throw InvalidInputError("POSECAL_SIMD=avx2 but AVX2 is unavailable");
      }
      return Impl::Avx2;
    }
    throw InvalidInputError("unknown POSECAL_SIMD value: " + name);
  }
  return available(Impl::Avx2) ? Impl::Avx2 : Impl::Scalar;
}

Impl& current_impl() {
  static Impl impl = default_impl();
  return impl;
}

}  // namespace

bool available(Impl impl) {
  switch (impl) {
    case Impl::Scalar:
      return true;
    case Impl::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

const Kernels& table(Impl impl) {
  switch (impl) {
    case Impl::Scalar:
      return kScalarKernels;
    case Impl::Avx2:
#ifdef POSECAL_HAVE_AVX2
      if (cpu_has_avx2()) return kAvx2Kernels;
#endif
      throw InvalidInputError("AVX2 kernels unavailable on this CPU/build");
  }
  throw InvalidInputError("unknown kernel implementation");
}

const Kernels& active() { return table(current_impl()); }

void set_impl(Impl impl) {
  table(impl);  // validates availability
  current_impl() = impl;
}

Impl active_impl() { return current_impl(); }

std::string impl_name(Impl impl) {
  switch (impl) {
    case Impl::Scalar:
      return "scalar";
    case Impl::Avx2:
      return "avx2";
  }
  return "?";
}

std::vector<Impl> available_impls() {
  std::vector<Impl> impls = {Impl::Scalar};
  if (available(Impl::Avx2)) impls.push_back(Impl::Avx2);
  return impls;
}

}  // namespace posecal::kernels
