#pragma once

#include <filesystem>
#include <string>

#include "bps/core.hpp"
#include "bps/random.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return BPS_TEST_DATA_DIR; }

// n points uniform in [-scale, scale]^dim.
inline bps::PointCloud random_cloud(std::size_t n, std::uint64_t seed, double scale = 1.0, std::size_t dim = 3) {
  bps::Rng rng(seed);
  std::vector<double> coords(n * dim);
  for (auto& c : coords) c = rng.uniform(-scale, scale);
  return bps::PointCloud(std::move(coords), dim);
}

// Random cloud with duplicated points and coordinates on a coarse lattice, to force exact distance ties.
inline bps::PointCloud tied_cloud(std::size_t n, std::uint64_t seed) {
  bps::Rng rng(seed);
  bps::PointCloud cloud(3);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && rng.uniform01() < 0.2) {
      const auto p = cloud.point3(rng.uniform_index(i));
      cloud.push_back(p);
      continue;
    }
    cloud.push_back(bps::Vec3{(static_cast<double>(rng.uniform_index(9)) - 4.0) / 4.0,
                              (static_cast<double>(rng.uniform_index(9)) - 4.0) / 4.0,
                              (static_cast<double>(rng.uniform_index(9)) - 4.0) / 4.0});
  }
  return cloud;
}

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "bps_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace testing
