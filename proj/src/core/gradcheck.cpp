#include "core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/rng.hpp"

namespace mvsc {

double grad_check(const LossFn& loss_fn, const ParamStore& params, double epsilon,
                  int min_coords, std::uint64_t seed) {
  require(epsilon > 0.0, errc::invalid_argument, "grad_check: epsilon must be > 0");

  ParamStore work;
  for (int i = 0; i < params.count(); ++i) {
    work.add(params.name(i), static_cast<int>(params.value(i).rows()),
             static_cast<int>(params.value(i).cols()));
    work.value(i) = params.value(i);
  }

  ParamStore analytic = params.zeros_like();
  const double base = loss_fn(work, &analytic);
  require(std::isfinite(base), errc::numeric, "grad_check: non-finite loss");

  // Flattened coordinate space across tensors.
  const std::int64_t total = params.total_size();
  std::vector<std::int64_t> chosen;
  if (total <= min_coords) {
    chosen.resize(static_cast<size_t>(total));
    for (std::int64_t i = 0; i < total; ++i) chosen[static_cast<size_t>(i)] = i;
  } else {
    Rng rng(seed);
    std::set<std::int64_t> picked;
    while (static_cast<int>(picked.size()) < min_coords) {
      const std::int64_t r =
          static_cast<std::int64_t>(rng.raw() % static_cast<std::uint64_t>(total));
      picked.insert(r);
    }
    chosen.assign(picked.begin(), picked.end());
  }

  // Tensor offsets for flat addressing.
  std::vector<std::int64_t> offsets(static_cast<size_t>(params.count()) + 1, 0);
  for (int i = 0; i < params.count(); ++i)
    offsets[static_cast<size_t>(i) + 1] = offsets[static_cast<size_t>(i)] + params.value(i).size();

  double max_rel = 0.0;
  for (std::int64_t flat : chosen) {
    int t = 0;
    while (offsets[static_cast<size_t>(t) + 1] <= flat) ++t;
    const std::int64_t local = flat - offsets[static_cast<size_t>(t)];
    Matrix& m = work.value(t);
    const Eigen::Index r = static_cast<Eigen::Index>(local) % m.rows();
    const Eigen::Index c = static_cast<Eigen::Index>(local) / m.rows();

    const double orig = m(r, c);
    const double h = epsilon * std::max(1.0, std::abs(orig));
    m(r, c) = orig + h;
    const double fp = loss_fn(work, nullptr);
    m(r, c) = orig - h;
    const double fm = loss_fn(work, nullptr);
    m(r, c) = orig;
    require(std::isfinite(fp) && std::isfinite(fm), errc::numeric,
            "grad_check: non-finite loss during perturbation");

    const double g_n = (fp - fm) / (2.0 * h);
    const double g_a = analytic.value(t)(r, c);
    const double rel = std::abs(g_a - g_n) / std::max(1e-8, std::abs(g_a) + std::abs(g_n));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace mvsc
