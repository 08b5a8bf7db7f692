#include "bps/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define BPS_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace bps::kernels {

#if BPS_HAVE_AVX2_KERNELS
namespace {

// Compiled per-function for AVX2 so the rest of the binary stays baseline x86-64.
#define BPS_AVX2 __attribute__((target("avx2")))

BPS_AVX2 BlockMin nearest_in_block_avx2(const double* base, std::size_t stride, std::size_t dim, std::size_t count,
                                        const double* query) {
  BlockMin best;
  const std::size_t count4 = count & ~std::size_t{3};
  if (count4 > 0) {
    __m256d best_d = _mm256_set1_pd(best.sq_dist);
    // Offsets are tracked as doubles; exact for any realistic block size.
    __m256d best_i = _mm256_set1_pd(-1.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d step = _mm256_set1_pd(4.0);
    for (std::size_t i = 0; i < count4; i += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t a = 0; a < dim; ++a) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(base + a * stride + i), _mm256_set1_pd(query[a]));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
      }
      const __m256d better = _mm256_cmp_pd(acc, best_d, _CMP_LT_OQ);
      best_d = _mm256_blendv_pd(best_d, acc, better);
      best_i = _mm256_blendv_pd(best_i, idx, better);
      idx = _mm256_add_pd(idx, step);
    }
    alignas(32) double lane_d[4];
    alignas(32) double lane_i[4];
    _mm256_store_pd(lane_d, best_d);
    _mm256_store_pd(lane_i, best_i);
    for (int l = 0; l < 4; ++l) {
      if (lane_i[l] < 0.0) continue;
      const auto off = static_cast<std::size_t>(lane_i[l]);
      if (lane_d[l] < best.sq_dist || (lane_d[l] == best.sq_dist && off < best.offset)) {
        best.sq_dist = lane_d[l];
        best.offset = off;
      }
    }
  }
  for (std::size_t i = count4; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      const double diff = base[a * stride + i] - query[a];
      acc = acc + diff * diff;
    }
    if (acc < best.sq_dist) {
      best.sq_dist = acc;
      best.offset = i;
    }
  }
  return best;
}

BPS_AVX2 double squared_l2_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) {
    const double diff = a[i] - b[i];
    total = total + diff * diff;
  }
  return total;
}

#undef BPS_AVX2

constexpr KernelTable kAvx2{SimdLevel::Avx2, &nearest_in_block_avx2, &squared_l2_avx2};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace bps::kernels
