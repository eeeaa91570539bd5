#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/nets.hpp"

namespace mvsc {

// Top-2 principal-component projection (deterministic sign convention).
Matrix pca2(const Matrix& x);

// Mean absolute cosine between matched rows of two code matrices.
double mean_abs_cosine(const Matrix& a, const Matrix& b);

// Cross-view correlation summary used by the correlation check: common codes
// of the two views against the common/specific codes inside view i.
struct CosineStats {
  double common_common;    // |cos(zc_i, zc_j)|, matched samples
  double common_specific;  // |cos(zc_i, zs_i)|, matched samples
};
CosineStats cosine_stats(const LatentBundle& view_i, const LatentBundle& view_j);

// Block cosine-similarity matrix over a sampled subset: row/col blocks are
// [zc_i, zs_i, zc_j, zs_j], one row per selected sample.
struct CosineBlockMatrix {
  Matrix values;                    // (4*subset) x (4*subset), unit diagonal
  std::vector<std::string> block_names;
  std::vector<int> sample_ids;
};
CosineBlockMatrix cosine_block_matrix(const LatentBundle& view_i, const LatentBundle& view_j,
                                      int subset, std::uint64_t seed);

// Sample order that groups rows by label (stable within a label).
std::vector<int> order_by_label(const std::vector<int>& labels);
Matrix reorder_symmetric(const Matrix& m, const std::vector<int>& order);

// Binary PPM (P6) writers.
// Magnitude heatmap: white = 0 up to dark blue = max.
void write_heatmap_ppm(const std::string& path, const Matrix& m);
// Signed heatmap on [-1,1]: blue/white/red.
void write_signed_heatmap_ppm(const std::string& path, const Matrix& m);
// 2D scatter colored by label.
void write_scatter_ppm(const std::string& path, const Matrix& xy,
                       const std::vector<int>& labels, int canvas = 360);

}  // namespace mvsc
