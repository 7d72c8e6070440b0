#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "nehari/field.hpp"
#include "nehari/grid.hpp"
#include "nehari/params.hpp"
#include "nehari/rng.hpp"

namespace nehari::testing {

/// Reference parameters: n=2, p=2, s=0.4, q=1.8, alpha=beta=5/3.
inline ModelParams reference_params(double lambda = 0.0, double mu = 0.0) {
  return ModelParams{2, 2.0, 0.4, 1.8, 5.0 / 3.0, 5.0 / 3.0, lambda, mu};
}

inline GridSpec grid_spec(int n, int m, double box = 1.0, double collar = 1.0) {
  GridSpec g;
  g.n = n;
  g.m = m;
  g.box_length = box;
  g.collar_factor = collar;
  return g;
}

inline Field random_field(std::size_t size, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Field f(size);
  for (std::size_t i = 0; i < size; ++i) f[i] = rng.uniform(lo, hi);
  return f;
}

inline FieldPair random_pair(std::size_t size, std::uint64_t seed, double lo = 0.1, double hi = 1.1) {
  return {random_field(size, 2 * seed + 1, lo, hi), random_field(size, 2 * seed + 2, lo, hi)};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(NEHARI_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace nehari::testing
