#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>

// Data-parallel inner loops with a scalar reference implementation and SIMD
// variants (AVX2 on x86-64, NEON on AArch64) chosen at runtime.
//
// Every variant performs the same IEEE operations in the same order as the
// scalar reference, so results are bit-identical regardless of which variant
// runs. The build disables FMA contraction to keep it that way.
namespace bps::kernels {

enum class SimdLevel { Scalar, Avx2, Neon };

std::string_view to_string(SimdLevel level);
std::optional<SimdLevel> parse_level(std::string_view name);

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct BlockMin {
  std::size_t offset = kNoIndex;  // position within the block; kNoIndex when count == 0
  double sq_dist = std::numeric_limits<double>::infinity();
};

/// Nearest point in a structure-of-arrays block. Coordinate (axis a, point i)
/// is base[a * stride + i]. Squared distances accumulate axis by axis from 0.0.
/// Ties resolve to the smallest offset.
using NearestInBlockFn = BlockMin (*)(const double* base, std::size_t stride, std::size_t dim, std::size_t count,
                                      const double* query);

/// Squared L2 distance between two length-n vectors. Summation order is fixed:
/// four interleaved partial sums over the first n & ~3 elements (lane l takes
/// i = l mod 4), combined as (s0 + s1) + (s2 + s3), then the tail added in order.
using SquaredL2Fn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
  SimdLevel level;
  NearestInBlockFn nearest_in_block;
  SquaredL2Fn squared_l2;
};

const KernelTable& scalar_table();
/// nullptr when the variant is not compiled into this build.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// True when the variant is compiled in and the running CPU supports it.
bool supported(SimdLevel level);

SimdLevel best_supported();

/// Table used by the library. Chosen once: the BPS_SIMD environment variable
/// (scalar|avx2|neon) if set and supported, otherwise best_supported().
const KernelTable& active();

/// Overrides the active table; throws std::invalid_argument if unsupported.
void set_active(SimdLevel level);

const KernelTable& table(SimdLevel level);

}  // namespace bps::kernels
