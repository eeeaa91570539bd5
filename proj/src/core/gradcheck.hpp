#pragma once

#include <cstdint>
#include <functional>

#include "core/params.hpp"

namespace mvsc {

// Scalar loss with optional analytic gradients. Implementations must hold all
// randomness (noise, negative permutations) fixed so the function is a pure
// map from parameters to a value.
using LossFn = std::function<double(const ParamStore&, ParamStore* grads)>;

// Compares analytic gradients against central finite differences on a random
// subset of at least `min_coords` coordinates (all coordinates when the model
// is smaller). Returns max over sampled coordinates of
//   |g_a - g_n| / max(1e-8, |g_a| + |g_n|).
double grad_check(const LossFn& loss_fn, const ParamStore& params, double epsilon,
                  int min_coords = 100, std::uint64_t seed = 20240101);

}  // namespace mvsc
