#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace mvsc {

namespace {

// Remaps arbitrary integer labels to 0..k-1 (sorted order of distinct values).
std::vector<int> compact_labels(const std::vector<int>& labels, int* k_out) {
  std::map<int, int> remap;
  for (int v : labels) remap.emplace(v, 0);
  int next = 0;
  for (auto& [key, idx] : remap) idx = next++;
  std::vector<int> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) out[i] = remap.at(labels[i]);
  if (k_out) *k_out = next;
  return out;
}

Eigen::MatrixXi contingency(const std::vector<int>& truth, const std::vector<int>& pred,
                            int kt, int kp) {
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(kt, kp);
  for (size_t i = 0; i < truth.size(); ++i)
    ++table(truth[i], pred[i]);
  return table;
}

void check_lengths(const std::vector<int>& truth, const std::vector<int>& pred) {
  require(truth.size() == pred.size(), errc::invalid_argument,
          "metrics: label vectors must have equal length");
  require(!truth.empty(), errc::invalid_argument, "metrics: empty label vectors");
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

std::vector<int> hungarian_min_cost(const Matrix& cost) {
  require(cost.rows() == cost.cols(), errc::invalid_argument,
          "assignment: cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = match[static_cast<size_t>(j0)];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                           v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assign(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<size_t>(j)] > 0)
      assign[static_cast<size_t>(match[static_cast<size_t>(j)]) - 1] = j - 1;
  return assign;
}

double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_lengths(truth, pred);
  int kt = 0, kp = 0;
  const std::vector<int> t = compact_labels(truth, &kt);
  const std::vector<int> p = compact_labels(pred, &kp);
  const int k = std::max(kt, kp);
  const Eigen::MatrixXi table = contingency(t, p, kt, kp);
  Matrix cost = Matrix::Zero(k, k);
  for (int r = 0; r < kt; ++r)
    for (int c = 0; c < kp; ++c) cost(r, c) = -static_cast<double>(table(r, c));
  const std::vector<int> assign = hungarian_min_cost(cost);
  double matched = 0.0;
  for (int r = 0; r < kt; ++r)
    if (assign[static_cast<size_t>(r)] < kp)
      matched += table(r, assign[static_cast<size_t>(r)]);
  return matched / static_cast<double>(truth.size());
}

double nmi(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_lengths(truth, pred);
  int kt = 0, kp = 0;
  const std::vector<int> t = compact_labels(truth, &kt);
  const std::vector<int> p = compact_labels(pred, &kp);
  const Eigen::MatrixXi table = contingency(t, p, kt, kp);
  const double n = static_cast<double>(truth.size());

  double ht = 0.0, hp = 0.0, mi = 0.0;
  std::vector<double> pt(static_cast<size_t>(kt), 0.0), pp(static_cast<size_t>(kp), 0.0);
  for (int r = 0; r < kt; ++r) pt[static_cast<size_t>(r)] = table.row(r).sum() / n;
  for (int c = 0; c < kp; ++c) pp[static_cast<size_t>(c)] = table.col(c).sum() / n;
  for (double q : pt)
    if (q > 0.0) ht -= q * std::log(q);
  for (double q : pp)
    if (q > 0.0) hp -= q * std::log(q);
  for (int r = 0; r < kt; ++r)
    for (int c = 0; c < kp; ++c) {
      const double q = table(r, c) / n;
      if (q > 0.0) mi += q * std::log(q / (pt[static_cast<size_t>(r)] * pp[static_cast<size_t>(c)]));
    }

  if (ht <= 0.0 && hp <= 0.0) return 1.0;  // both single-cluster
  if (ht <= 0.0 || hp <= 0.0) return 0.0;
  return std::clamp(mi / std::sqrt(ht * hp), 0.0, 1.0);
}

double ari(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_lengths(truth, pred);
  int kt = 0, kp = 0;
  const std::vector<int> t = compact_labels(truth, &kt);
  const std::vector<int> p = compact_labels(pred, &kp);
  const Eigen::MatrixXi table = contingency(t, p, kt, kp);
  const double n = static_cast<double>(truth.size());

  double sum_ij = 0.0;
  for (int r = 0; r < kt; ++r)
    for (int c = 0; c < kp; ++c) sum_ij += comb2(table(r, c));
  double sum_a = 0.0, sum_b = 0.0;
  for (int r = 0; r < kt; ++r) sum_a += comb2(table.row(r).sum());
  for (int c = 0; c < kp; ++c) sum_b += comb2(table.col(c).sum());
  const double total = comb2(n);
  const double expected = sum_a * sum_b / total;
  const double denom = 0.5 * (sum_a + sum_b) - expected;
  if (denom == 0.0) return 0.0;
  return (sum_ij - expected) / denom;
}

double brute_force_accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_lengths(truth, pred);
  int kt = 0, kp = 0;
  const std::vector<int> t = compact_labels(truth, &kt);
  const std::vector<int> p = compact_labels(pred, &kp);
  const int k = std::max(kt, kp);
  require(k <= 6, errc::invalid_argument,
          "brute-force accuracy supports at most 6 classes (got " + std::to_string(k) + ")");
  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  int best = 0;
  do {
    int matched = 0;
    for (size_t i = 0; i < t.size(); ++i)
      if (perm[static_cast<size_t>(p[i])] == t[i]) ++matched;
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(t.size());
}

MetricsReport evaluate_clustering(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_lengths(truth, pred);
  MetricsReport rep;
  int kt = 0, kp = 0;
  const std::vector<int> t = compact_labels(truth, &kt);
  const std::vector<int> p = compact_labels(pred, &kp);
  rep.confusion = contingency(t, p, kt, kp);
  rep.n = static_cast<int>(truth.size());
  rep.k = std::max(kt, kp);
  rep.acc = accuracy(truth, pred);
  rep.nmi = nmi(truth, pred);
  rep.ari = ari(truth, pred);
  return rep;
}

}  // namespace mvsc
