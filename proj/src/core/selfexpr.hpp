#pragma once

#include <cstdint>
#include <vector>

#include "core/common.hpp"
#include "core/tape.hpp"

namespace mvsc {

// Self-expression convention: sample j is reconstructed from the other
// samples with the coefficients in column j of C, i.e. Z~ = C^T Z with
// samples as rows and diag(C) = 0.
Matrix self_express(const Matrix& codes, const Matrix& coeffs);

// ||Z - Z~||_F^2 + lambda_se ||C||_F^2 (diagonal excluded by construction).
double selfexpr_loss(const Matrix& codes, const Matrix& coeffs, double lambda_se);
ad::Var selfexpr_loss_graph(ad::Tape& t, ad::Var codes, ad::Var coeffs_nodiag,
                            double lambda_se);

// Exact minimizer of the loss above for fixed codes: one ridge system per
// sample over all other samples. Requires lambda_se > 0.
Matrix closed_form_selfexpr(const Matrix& codes, double lambda_se);

// Mean coefficient matrix across views, then W = (|Cbar| + |Cbar|^T) / 2 with
// a zeroed diagonal.
Matrix fuse_affinities(const std::vector<Matrix>& coeff_list);

void validate_affinity(const Matrix& w);

// Normalized-Laplacian spectral clustering with seeded k-means.
std::vector<int> spectral_cluster(const Matrix& affinity, int k, std::uint64_t seed,
                                  int kmeans_restarts = 20, int kmeans_iters = 300,
                                  double kmeans_tol = 1e-6);

// Plain k-means on rows of X. Restarts use k-means++ seeding; the labeling
// with the best inertia wins. Deterministic given seed.
std::vector<int> kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts,
                        int max_iters, double tol, double* best_inertia = nullptr);

}  // namespace mvsc
