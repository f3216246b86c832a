#include "posecal/kernels.hpp"

// AVX2 kernel variants. Compiled with -mavx2 only when the compiler supports
// it; selected at runtime after a cpuid check (see dispatch.cpp). The double
// kernels use plain mul/div in the same order as the scalar reference, so
// with contraction disabled the results are bit-identical.

#ifdef POSECAL_HAVE_AVX2

#include <immintrin.h>

#include "tables.hpp"

namespace posecal::kernels {

namespace {

std::uint64_t avx2_count_nonzero(const std::uint8_t* data, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    __m256i is_zero = _mm256_cmpeq_epi8(v, zero);
    std::uint32_t mask = static_cast<std::uint32_t>(_mm256_movemask_epi8(is_zero));
    count += 32u - static_cast<unsigned>(__builtin_popcount(mask));
  }
  for (; i < n; ++i) {
    count += data[i] != 0;
  }
  return count;
}

std::uint64_t avx2_count_both_nonzero(const std::uint8_t* a,
                                      const std::uint8_t* b, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    // A byte survives iff it is nonzero in both inputs.
    __m256i a_nz = _mm256_cmpeq_epi8(va, zero);  // 0xFF where a == 0
    __m256i b_nz = _mm256_cmpeq_epi8(vb, zero);
    __m256i either_zero = _mm256_or_si256(a_nz, b_nz);
    std::uint32_t mask =
        static_cast<std::uint32_t>(_mm256_movemask_epi8(either_zero));
    count += 32u - static_cast<unsigned>(__builtin_popcount(mask));
  }
  for (; i < n; ++i) {
    count += (a[i] != 0) && (b[i] != 0);
  }
  return count;
}

CentroidSums avx2_centroid_sums(const std::uint8_t* data, std::size_t width,
                                std::size_t height) {
  const __m256i zero = _mm256_setzero_si256();
  CentroidSums sums;
  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t* row = data + y * width;
    std::uint64_t row_count = 0;
    std::uint64_t row_sum_x = 0;
    std::size_t x = 0;
    for (; x + 32 <= width; x += 32) {
      __m256i v =
          _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + x));
      __m256i is_zero = _mm256_cmpeq_epi8(v, zero);
      std::uint32_t bits =
          ~static_cast<std::uint32_t>(_mm256_movemask_epi8(is_zero));
      row_count += static_cast<unsigned>(__builtin_popcount(bits));
      while (bits != 0) {
        row_sum_x += x + static_cast<unsigned>(__builtin_ctz(bits));
        bits &= bits - 1;
      }
    }
    for (; x < width; ++x) {
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

void avx2_batch_depth_from_scale(double f, double mu, const double* s,
                                 const double* alpha, double* out,
                                 std::size_t n) {
  const double mu_f = mu * f;
  const __m256d vmu_f = _mm256_set1_pd(mu_f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vs = _mm256_loadu_pd(s + i);
    __m256d va = _mm256_loadu_pd(alpha + i);
    __m256d denom = _mm256_mul_pd(vs, va);
    _mm256_storeu_pd(out + i, _mm256_div_pd(vmu_f, denom));
  }
  for (; i < n; ++i) {
    out[i] = mu_f / (s[i] * alpha[i]);
  }
}

void avx2_batch_focal_from_depth(double depth, double mu, const double* s,
                                 const double* alpha, double* out,
                                 std::size_t n) {
  const __m256d vd = _mm256_set1_pd(depth);
  const __m256d vmu = _mm256_set1_pd(mu);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vs = _mm256_loadu_pd(s + i);
    __m256d va = _mm256_loadu_pd(alpha + i);
    __m256d num = _mm256_mul_pd(_mm256_mul_pd(vd, vs), va);
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, vmu));
  }
  for (; i < n; ++i) {
    out[i] = ((depth * s[i]) * alpha[i]) / mu;
  }
}

}  // namespace

const Kernels kAvx2Kernels = {
    avx2_count_nonzero,       avx2_count_both_nonzero, avx2_centroid_sums,
    avx2_batch_depth_from_scale, avx2_batch_focal_from_depth,
};

}  // namespace posecal::kernels

#endif  // POSECAL_HAVE_AVX2
