#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/discrete.hpp"
#include "core/nets.hpp"

namespace mvsc {

// One oracle check: pass iff value <= threshold.
struct CheckResult {
  std::string name;
  double value;
  double threshold;
  bool pass;
  std::string note;
};

// Random constructions for the information-identity oracle.
DiscreteJoint random_deterministic_encoder_joint(std::uint64_t seed);
DiscreteJoint random_joint3(std::uint64_t seed);
DiscreteJoint random_coarsening_joint(std::uint64_t seed);

// Closed-form KL against a Monte-Carlo estimate; the KL implementation is a
// parameter so a deliberately broken one is observable in tests.
CheckResult kl_monte_carlo_check(const std::function<double(const GaussianCode&)>& kl_fn,
                                 int num_codes, long long samples_per_code,
                                 std::uint64_t seed);

// Gradient-descent minimizer of the self-expression loss using the tape
// gradient; converges to the ridge closed form. Exposed for the oracle
// comparison.
Matrix gradient_selfexpr(const Matrix& codes, double lambda_se, int max_iters = 20000,
                         double tol = 1e-10);

// Full oracle suite behind the `verify` command.
std::vector<CheckResult> run_verification(std::uint64_t seed = 90210);
bool all_passed(const std::vector<CheckResult>& checks);
std::string format_verification_report(const std::vector<CheckResult>& checks);

}  // namespace mvsc
