#pragma once

#include <vector>

#include "core/common.hpp"

namespace mvsc {

struct MetricsReport {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  Eigen::MatrixXi confusion;  // truth classes x predicted classes
  int n = 0;
  int k = 0;
};

// Clustering accuracy under the best label matching (optimal assignment on
// the contingency table).
double accuracy(const std::vector<int>& truth, const std::vector<int>& pred);

// Normalized mutual information in nats, geometric-mean normalization.
// Both partitions trivial -> 1.0; exactly one trivial -> 0.0.
double nmi(const std::vector<int>& truth, const std::vector<int>& pred);

// Adjusted Rand index; 0 when the chance-corrected denominator vanishes.
double ari(const std::vector<int>& truth, const std::vector<int>& pred);

// Exhaustive maximization over all label permutations; oracle for accuracy().
// Rejected above 6 classes.
double brute_force_accuracy(const std::vector<int>& truth, const std::vector<int>& pred);

MetricsReport evaluate_clustering(const std::vector<int>& truth, const std::vector<int>& pred);

// Min-cost assignment on a square cost matrix (O(n^3) potentials method).
// Returns the matched column for each row.
std::vector<int> hungarian_min_cost(const Matrix& cost);

}  // namespace mvsc
