#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "core/common.hpp"

namespace mvsc {

// Derives an independent stream seed from a master seed, a purpose tag and up
// to two counters (step index, view index, ...). Runs stay reproducible
// without threading a single RNG state through the whole pipeline.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0,1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n).
  int uniform_int(int n);
  // Standard normal via Box-Muller; independent of library distributions so
  // streams are stable across standard library versions.
  double normal();

  Matrix normal_matrix(int rows, int cols);
  std::vector<int> permutation(int n);  // uniform Fisher-Yates shuffle of 0..n-1

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mvsc
