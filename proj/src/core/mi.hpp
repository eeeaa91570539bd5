#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/nets.hpp"
#include "core/params.hpp"
#include "core/tape.hpp"

namespace mvsc {

// Within-batch negatives. Rejection-samples up to 10 shuffles looking for a
// derangement, then accepts any non-identity permutation. Deterministic given
// seed; batches of one row have no valid negative.
std::vector<int> negative_permutation(int n, std::uint64_t seed);
Matrix negative_sampling(const Matrix& batch, std::uint64_t seed);

// Binary-cross-entropy dependence objective on row-aligned pairs:
//   mean log sigmoid(D(anchor, positive)) + mean log(1 - sigmoid(D(anchor, negative)))
// Higher means the discriminator separates matched pairs from shuffled ones.
ad::Var jsd_objective_graph(ad::Tape& t, ad::Var logits_pos, ad::Var logits_neg);
double jsd_mi_objective(const Matrix& anchor, const Matrix& positive, const Matrix& negative,
                        const ParamStore& params, const std::string& head_id);

// KL( N(mean, diag exp(log_var)) || N(0, I) ), averaged over the batch:
//   mean_rows 1/2 sum_j (mean^2 + exp(log_var) - log_var - 1).
ad::Var kl_std_normal_graph(ad::Tape& t, ad::Var mean, ad::Var log_var);
double kl_to_standard_normal(const GaussianCode& code);

}  // namespace mvsc
