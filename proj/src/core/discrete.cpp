#include "core/discrete.hpp"

#include <cmath>

namespace mvsc {

namespace {
constexpr double kFloor = 1e-12;

double xlogx_ratio(double joint, double denom_a, double denom_b) {
  // joint * log(joint / (denom_a * denom_b)), with 0 contributing 0.
  if (joint <= 0.0) return 0.0;
  return joint * std::log(joint / (denom_a * denom_b));
}
}  // namespace

std::size_t DiscreteJoint::flat(const std::vector<int>& idx) const {
  require(idx.size() == card.size(), errc::invalid_argument, "joint: index arity mismatch");
  std::size_t f = 0;
  for (size_t v = 0; v < card.size(); ++v) {
    require(idx[v] >= 0 && idx[v] < card[v], errc::invalid_argument,
            "joint: index out of range");
    f = f * static_cast<std::size_t>(card[v]) + static_cast<std::size_t>(idx[v]);
  }
  return f;
}

DiscreteJoint DiscreteJoint::zeros(std::vector<int> card) {
  DiscreteJoint j;
  std::size_t size = 1;
  for (int c : card) {
    require(c >= 1, errc::invalid_argument, "joint: cardinality must be >= 1");
    size *= static_cast<std::size_t>(c);
  }
  j.card = std::move(card);
  j.p.assign(size, 0.0);
  return j;
}

void DiscreteJoint::validate() const {
  require(num_vars() == 2 || num_vars() == 3, errc::invalid_argument,
          "joint: only 2 or 3 variables supported");
  double sum = 0.0;
  for (double v : p) {
    require(v >= 0.0, errc::invalid_argument, "joint: negative probability");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-12, errc::invalid_argument,
          "joint: probabilities must sum to 1 (got " + std::to_string(sum) + ")");
}

namespace {

// Enumerates the full table via an index vector in fixed order.
template <typename F>
void for_each_outcome(const DiscreteJoint& j, F&& f) {
  std::vector<int> idx(static_cast<size_t>(j.num_vars()), 0);
  while (true) {
    f(idx, j.at(idx));
    int v = j.num_vars() - 1;
    while (v >= 0) {
      if (++idx[static_cast<size_t>(v)] < j.card[static_cast<size_t>(v)]) break;
      idx[static_cast<size_t>(v)] = 0;
      --v;
    }
    if (v < 0) break;
  }
}

std::vector<double> marginal1(const DiscreteJoint& j, int a) {
  std::vector<double> m(static_cast<size_t>(j.card[static_cast<size_t>(a)]), 0.0);
  for_each_outcome(j, [&](const std::vector<int>& idx, double p) {
    m[static_cast<size_t>(idx[static_cast<size_t>(a)])] += p;
  });
  return m;
}

std::vector<std::vector<double>> marginal2(const DiscreteJoint& j, int a, int b) {
  std::vector<std::vector<double>> m(
      static_cast<size_t>(j.card[static_cast<size_t>(a)]),
      std::vector<double>(static_cast<size_t>(j.card[static_cast<size_t>(b)]), 0.0));
  for_each_outcome(j, [&](const std::vector<int>& idx, double p) {
    m[static_cast<size_t>(idx[static_cast<size_t>(a)])]
     [static_cast<size_t>(idx[static_cast<size_t>(b)])] += p;
  });
  return m;
}

}  // namespace

double discrete_mi(const DiscreteJoint& joint, int a, int b) {
  joint.validate();
  require(a != b && a >= 0 && b >= 0 && a < joint.num_vars() && b < joint.num_vars(),
          errc::invalid_argument, "discrete_mi: bad variable indices");
  const auto pa = marginal1(joint, a);
  const auto pb = marginal1(joint, b);
  const auto pab = marginal2(joint, a, b);
  double mi = 0.0;
  for (size_t x = 0; x < pa.size(); ++x)
    for (size_t y = 0; y < pb.size(); ++y)
      mi += xlogx_ratio(pab[x][y], pa[x], pb[y]);
  return mi;
}

double discrete_cmi(const DiscreteJoint& joint, int a, int b, int c) {
  joint.validate();
  require(joint.num_vars() == 3, errc::invalid_argument, "discrete_cmi: need 3 variables");
  require(a != b && b != c && a != c, errc::invalid_argument,
          "discrete_cmi: variables must be distinct");
  const auto pc = marginal1(joint, c);
  const auto pac = marginal2(joint, a, c);
  const auto pbc = marginal2(joint, b, c);
  // I(a;b|c) = sum p(a,b,c) log[ p(c) p(a,b,c) / (p(a,c) p(b,c)) ]
  double cmi = 0.0;
  for_each_outcome(joint, [&](const std::vector<int>& idx, double p) {
    if (p <= 0.0) return;
    const size_t xa = static_cast<size_t>(idx[static_cast<size_t>(a)]);
    const size_t xb = static_cast<size_t>(idx[static_cast<size_t>(b)]);
    const size_t xc = static_cast<size_t>(idx[static_cast<size_t>(c)]);
    cmi += p * std::log(pc[xc] * p / (pac[xa][xc] * pbc[xb][xc]));
  });
  return cmi;
}

double discrete_mi_pair(const DiscreteJoint& joint, int a, int b, int c) {
  joint.validate();
  require(joint.num_vars() == 3, errc::invalid_argument, "discrete_mi_pair: need 3 variables");
  const auto pa = marginal1(joint, a);
  const auto pbc = marginal2(joint, b, c);
  double mi = 0.0;
  for_each_outcome(joint, [&](const std::vector<int>& idx, double p) {
    if (p <= 0.0) return;
    const size_t xa = static_cast<size_t>(idx[static_cast<size_t>(a)]);
    const size_t xb = static_cast<size_t>(idx[static_cast<size_t>(b)]);
    const size_t xc = static_cast<size_t>(idx[static_cast<size_t>(c)]);
    mi += p * std::log(p / (pa[xa] * pbc[xb][xc]));
  });
  return mi;
}

DecompositionResiduals verify_decomposition(const DiscreteJoint& joint) {
  const double i_v_zi = discrete_mi(joint, 0, 1);
  const double i_v_zj = discrete_mi(joint, 0, 2);
  const double i_zi_zj = discrete_mi(joint, 1, 2);
  const double i_v_zi_given_zj = discrete_cmi(joint, 0, 1, 2);
  const double i_v_pair = discrete_mi_pair(joint, 0, 1, 2);
  DecompositionResiduals r;
  r.split = i_v_zi - i_v_zi_given_zj - i_zi_zj;
  r.chain = i_v_pair - i_v_zj - i_v_zi_given_zj;
  r.reduce = i_v_zi_given_zj - (i_v_zi - i_v_zj);
  return r;
}

double tabular_disc_objective(const Matrix& positives, const Matrix& negatives) {
  require(positives.rows() == negatives.rows() && positives.cols() == negatives.cols(),
          errc::invalid_argument, "tabular objective: shape mismatch");
  require(positives.minCoeff() >= 0.0 && negatives.minCoeff() >= 0.0,
          errc::invalid_argument, "tabular objective: negative entry");
  require(std::abs(positives.sum() - 1.0) <= 1e-9 && std::abs(negatives.sum() - 1.0) <= 1e-9,
          errc::invalid_argument, "tabular objective: entries must sum to 1");
  double obj = 0.0;
  for (Eigen::Index r = 0; r < positives.rows(); ++r) {
    for (Eigen::Index c = 0; c < positives.cols(); ++c) {
      const double pj = positives(r, c);
      const double pq = negatives(r, c);
      if (pj + pq <= 0.0) continue;
      const double dstar = pj / (pj + pq);
      if (pj > 0.0) obj += pj * std::log(std::max(dstar, kFloor));
      if (pq > 0.0) obj += pq * std::log(std::max(1.0 - dstar, kFloor));
    }
  }
  return obj;
}

double tabular_disc_objective(const Matrix& joint) {
  const Vector pa = joint.rowwise().sum();
  const Vector pb = joint.colwise().sum();
  return tabular_disc_objective(joint, pa * pb.transpose());
}

Matrix discretized_bivariate_gaussian(double rho, int bins, double range) {
  require(bins >= 2, errc::invalid_argument, "discretization needs >= 2 bins");
  require(std::abs(rho) < 1.0, errc::invalid_argument, "|rho| must be < 1");
  Matrix joint(bins, bins);
  const double det = 1.0 - rho * rho;
  for (int i = 0; i < bins; ++i) {
    const double x = -range + (i + 0.5) * (2.0 * range / bins);
    for (int j = 0; j < bins; ++j) {
      const double y = -range + (j + 0.5) * (2.0 * range / bins);
      joint(i, j) = std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * det));
    }
  }
  joint /= joint.sum();
  return joint;
}

}  // namespace mvsc
