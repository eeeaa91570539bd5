#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace mvsc {

// Synthetic generator: k clusters drawn from random low-dimensional linear
// subspaces of a shared latent space, observed through a distinct map per
// view. With `none` the per-view map is purely linear; `tanh_affine` is
// affine -> tanh -> affine.
struct SynthSpec {
  int n = 500;
  int k = 5;
  int subspace_dim = 3;
  int latent_dim = 10;
  std::vector<int> view_dims = {30, 30};
  double noise_sigma = 0.1;
  enum class Nonlinearity { none, tanh_affine };
  Nonlinearity nonlinearity = Nonlinearity::tanh_affine;
  std::uint64_t seed = 1;

  void validate() const;
  static Nonlinearity parse_nonlinearity(const std::string& s);
  std::string nonlinearity_name() const;
};

struct MultiViewDataset {
  std::vector<Matrix> views;             // views[i]: n x d_i
  std::vector<std::string> names;        // one per view
  std::optional<std::vector<int>> labels;  // values in 0..k-1, every class present
  std::string manifest_extra;            // provenance (JSON fragment), carried through save/load

  int num_samples() const { return views.empty() ? 0 : static_cast<int>(views.front().rows()); }
  int num_views() const { return static_cast<int>(views.size()); }
  int num_classes() const;  // 0 when labels absent
  void validate() const;
};

MultiViewDataset generate_synthetic(const SynthSpec& spec);

// Directory layout: manifest.json + one CSV per view (+ labels file).
void save_dataset(const MultiViewDataset& ds, const std::string& dir);
MultiViewDataset load_dataset(const std::string& dir);

enum class NormalizeMode { zscore, minmax, none };
NormalizeMode parse_normalize_mode(const std::string& s);
const char* normalize_mode_name(NormalizeMode m);

MultiViewDataset normalize_views(const MultiViewDataset& ds, NormalizeMode mode);

}  // namespace mvsc
