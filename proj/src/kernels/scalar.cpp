#include "posecal/kernels.hpp"

#include "tables.hpp"

// Scalar reference kernels. These define the semantics; the SIMD variants
// must match them bit for bit. Keep the floating-point operation order in
// sync with the vector code.

namespace posecal::kernels {

std::uint64_t scalar_count_nonzero(const std::uint8_t* data, std::size_t n) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += data[i] != 0;
  }
  return count;
}

std::uint64_t scalar_count_both_nonzero(const std::uint8_t* a,
                                        const std::uint8_t* b, std::size_t n) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += (a[i] != 0) && (b[i] != 0);
  }
  return count;
}

CentroidSums scalar_centroid_sums(const std::uint8_t* data, std::size_t width,
                                  std::size_t height) {
  CentroidSums sums;
  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t* row = data + y * width;
    std::uint64_t row_count = 0;
    std::uint64_t row_sum_x = 0;
    for (std::size_t x = 0; x < width; ++x) {
      if (row[x] != 0) {
        ++row_count;
        row_sum_x += x;
      }
    }
    sums.count += row_count;
    sums.sum_x += row_sum_x;
    sums.sum_y += row_count * y;
  }
  return sums;
}

void scalar_batch_depth_from_scale(double f, double mu, const double* s,
                                   const double* alpha, double* out,
                                   std::size_t n) {
  const double mu_f = mu * f;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = mu_f / (s[i] * alpha[i]);
  }
}

void scalar_batch_focal_from_depth(double depth, double mu, const double* s,
                                   const double* alpha, double* out,
                                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = ((depth * s[i]) * alpha[i]) / mu;
  }
}

const Kernels kScalarKernels = {
    scalar_count_nonzero,       scalar_count_both_nonzero,
    scalar_centroid_sums,       scalar_batch_depth_from_scale,
    scalar_batch_focal_from_depth,
};

}  // namespace posecal::kernels
