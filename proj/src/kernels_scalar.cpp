#include "bps/kernels.hpp"

namespace bps::kernels {
namespace {

BlockMin nearest_in_block_scalar(const double* base, std::size_t stride, std::size_t dim, std::size_t count,
                                 const double* query) {
  BlockMin best;
  for (std::size_t i = 0; i < count; ++i) {
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

double squared_l2_scalar(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double diff = a[i + l] - b[i + l];
      lane[l] = lane[l] + diff * diff;
    }
  }
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) {
    const double diff = a[i] - b[i];
    total = total + diff * diff;
  }
  return total;
}

constexpr KernelTable kScalar{SimdLevel::Scalar, &nearest_in_block_scalar, &squared_l2_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace bps::kernels
