#pragma once

#include <vector>

#include "core/common.hpp"

namespace mvsc {

// Exact joint distribution over 2 or 3 discrete variables. Used as the
// brute-force oracle for every information identity in the test and
// verification suites.
struct DiscreteJoint {
  std::vector<int> card;   // cardinality per variable
  std::vector<double> p;   // row-major over outcomes, sums to 1

  int num_vars() const { return static_cast<int>(card.size()); }
  std::size_t flat(const std::vector<int>& idx) const;
  double& at(const std::vector<int>& idx) { return p[flat(idx)]; }
  double at(const std::vector<int>& idx) const { return p[flat(idx)]; }

  static DiscreteJoint zeros(std::vector<int> card);
  void validate() const;  // nonnegative entries summing to 1 within 1e-12
};

// Mutual information I(a;b) in nats; zero-probability terms contribute 0.
double discrete_mi(const DiscreteJoint& joint, int a, int b);
// Conditional mutual information I(a;b|c) in nats.
double discrete_cmi(const DiscreteJoint& joint, int a, int b, int c);
// I(a; (b,c)) treating the pair as one variable.
double discrete_mi_pair(const DiscreteJoint& joint, int a, int b, int c);

// Residuals of the information identities used by the verification suite,
// evaluated on a joint over (v, zi, zj) = axes (0, 1, 2):
//   split:  I(v;zi) - I(v;zi|zj) - I(zi;zj)      (zero when zi, zj are
//           deterministic functions of v)
//   chain:  I(v;zi,zj) - I(v;zj) - I(v;zi|zj)    (always zero)
//   reduce: I(v;zi|zj) - (I(v;zi) - I(v;zj))     (zero when zj is a
//           deterministic function of zi)
struct DecompositionResiduals {
  double split;
  double chain;
  double reduce;
};
DecompositionResiduals verify_decomposition(const DiscreteJoint& joint);

// Optimal-discriminator objective for a tabular positive distribution against
// an explicit negative distribution:
//   sum p log D* + sum q log(1 - D*),  D* = p / (p + q),
// with logs floored at 1e-12.
double tabular_disc_objective(const Matrix& positives, const Matrix& negatives);
// Negatives default to the product of the positives' marginals; equals
// 2 log(1/2) exactly at independence.
double tabular_disc_objective(const Matrix& joint);

// Bivariate normal with correlation rho, discretized on a bins x bins grid of
// cell centers over [-range, range]^2 and normalized.
Matrix discretized_bivariate_gaussian(double rho, int bins, double range);

}  // namespace mvsc
