#include "bps/kernels.hpp"

#if defined(__aarch64__)
#define BPS_HAVE_NEON_KERNELS 1
#include <arm_neon.h>
#endif

namespace bps::kernels {

#if BPS_HAVE_NEON_KERNELS
namespace {

// Two-lane float64 variant. vmlaq_f64 is avoided: it may fuse.
BlockMin nearest_in_block_neon(const double* base, std::size_t stride, std::size_t dim, std::size_t count,
                               const double* query) {
  BlockMin best;
  const std::size_t count2 = count & ~std::size_t{1};
  if (count2 > 0) {
    float64x2_t best_d = vdupq_n_f64(best.sq_dist);
    float64x2_t best_i = vdupq_n_f64(-1.0);
    const double init_idx[2] = {0.0, 1.0};
    float64x2_t idx = vld1q_f64(init_idx);
    const float64x2_t step = vdupq_n_f64(2.0);
    for (std::size_t i = 0; i < count2; i += 2) {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (std::size_t a = 0; a < dim; ++a) {
        const float64x2_t diff = vsubq_f64(vld1q_f64(base + a * stride + i), vdupq_n_f64(query[a]));
        acc = vaddq_f64(acc, vmulq_f64(diff, diff));
      }
      const uint64x2_t better = vcltq_f64(acc, best_d);
      best_d = vbslq_f64(better, acc, best_d);
      best_i = vbslq_f64(better, idx, best_i);
      idx = vaddq_f64(idx, step);
    }
    double lane_d[2];
    double lane_i[2];
    vst1q_f64(lane_d, best_d);
    vst1q_f64(lane_i, best_i);
    for (int l = 0; l < 2; ++l) {
      if (lane_i[l] < 0.0) continue;
      const auto off = static_cast<std::size_t>(lane_i[l]);
      if (lane_d[l] < best.sq_dist || (lane_d[l] == best.sq_dist && off < best.offset)) {
        best.sq_dist = lane_d[l];
        best.offset = off;
      }
    }
  }
  for (std::size_t i = count2; i < count; ++i) {
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

// Lanes l = 0..3 are held as two float64x2 accumulators: (s0, s1) and (s2, s3).
double squared_l2_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  double total = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) + (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (std::size_t i = n4; i < n; ++i) {
    const double diff = a[i] - b[i];
    total = total + diff * diff;
  }
  return total;
}

constexpr KernelTable kNeon{SimdLevel::Neon, &nearest_in_block_neon, &squared_l2_neon};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

#else

const KernelTable* neon_table() { return nullptr; }

#endif

}  // namespace bps::kernels
