#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "bps/kernels.hpp"

namespace bps::kernels {

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::Scalar: return "scalar";
    case SimdLevel::Avx2: return "avx2";
    case SimdLevel::Neon: return "neon";
  }
  return "unknown";
}

std::optional<SimdLevel> parse_level(std::string_view name) {
  if (name == "scalar") return SimdLevel::Scalar;
  if (name == "avx2") return SimdLevel::Avx2;
  if (name == "neon") return SimdLevel::Neon;
  return std::nullopt;
}

bool supported(SimdLevel level) {
  switch (level) {
    case SimdLevel::Scalar: return true;
    case SimdLevel::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case SimdLevel::Neon: return neon_table() != nullptr;
  }
  return false;
}

SimdLevel best_supported() {
  if (supported(SimdLevel::Avx2)) return SimdLevel::Avx2;
  if (supported(SimdLevel::Neon)) return SimdLevel::Neon;
  return SimdLevel::Scalar;
}

const KernelTable& table(SimdLevel level) {
  if (!supported(level)) throw std::invalid_argument("SIMD level not supported: " + std::string(to_string(level)));
  switch (level) {
    case SimdLevel::Avx2: return *avx2_table();
    case SimdLevel::Neon: return *neon_table();
    case SimdLevel::Scalar: break;
  }
  return scalar_table();
}

namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("BPS_SIMD")) {
    if (auto level = parse_level(env); level && supported(*level)) return &table(*level);
  }
  return &table(best_supported());
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(SimdLevel level) { active_slot().store(&table(level), std::memory_order_release); }

}  // namespace bps::kernels
