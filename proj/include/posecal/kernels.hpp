#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace posecal::kernels {

/// Accumulated pixel sums of a binary raster; enough to derive the centroid.
struct CentroidSums {
  std::uint64_t sum_x = 0;
  std::uint64_t sum_y = 0;
  std::uint64_t count = 0;
};

/// The data-parallel inner loops of the toolkit. Each entry has a scalar
/// reference implementation and, on x86-64, an AVX2 variant selected at
/// runtime. All variants are bit-identical to the scalar reference (the
/// float kernels use the same operation order and the build disables FP
/// contraction), which the kernel test suite asserts on random inputs.
struct Kernels {
  /// Number of nonzero bytes in data[0..n).
  std::uint64_t (*count_nonzero)(const std::uint8_t* data, std::size_t n);

  /// Number of positions where both a and b are nonzero.
  std::uint64_t (*count_both_nonzero)(const std::uint8_t* a,
                                      const std::uint8_t* b, std::size_t n);

  /// Coordinate sums over the nonzero pixels of a width x height row-major
  /// raster.
  CentroidSums (*centroid_sums)(const std::uint8_t* data, std::size_t width,
                                std::size_t height);

  /// out[i] = (mu * f) / (s[i] * alpha[i])
  void (*batch_depth_from_scale)(double f, double mu, const double* s,
                                 const double* alpha, double* out,
                                 std::size_t n);

  /// out[i] = ((depth * s[i]) * alpha[i]) / mu
  void (*batch_focal_from_depth)(double depth, double mu, const double* s,
                                 const double* alpha, double* out,
                                 std::size_t n);
};

enum class Impl {
  Scalar,
  Avx2,
};

/// Kernel table for one implementation. Throws InvalidInputError if the
/// implementation was not compiled in or the CPU lacks the feature.
const Kernels& table(Impl impl);

bool available(Impl impl);

/// The active table: the best available implementation, unless overridden
/// by set_impl() or the POSECAL_SIMD environment variable
/// ("scalar" | "avx2", read once at first use).
const Kernels& active();

/// Force a specific implementation process-wide (used by tests and the CLI).
void set_impl(Impl impl);

Impl active_impl();
std::string impl_name(Impl impl);

std::vector<Impl> available_impls();

}  // namespace posecal::kernels
