#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/common.hpp"
#include "core/tape.hpp"

namespace mvsc {

// Ordered collection of named parameter tensors. Order is the registration
// order and is part of the determinism contract (initialization, optimizer
// state and checkpoints all follow it).
class ParamStore {
 public:
  Matrix& add(const std::string& name, int rows, int cols);
  Matrix& at(const std::string& name);
  const Matrix& at(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) > 0; }

  int count() const { return static_cast<int>(entries_.size()); }
  const std::string& name(int i) const { return entries_[static_cast<size_t>(i)].name; }
  Matrix& value(int i) { return entries_[static_cast<size_t>(i)].value; }
  const Matrix& value(int i) const { return entries_[static_cast<size_t>(i)].value; }

  std::int64_t total_size() const;

  // Same names/shapes, zero values. Used for gradient accumulation.
  ParamStore zeros_like() const;

 private:
  struct Entry {
    std::string name;
    Matrix value;
  };
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

// Binary checkpoint: magic, config echo, then per tensor name / rows / cols /
// row-major 64-bit values.
void save_checkpoint(const ParamStore& params, const std::string& path,
                     const std::string& config_echo);
ParamStore load_checkpoint(const std::string& path, std::string* config_echo);

// Registers every tensor of a ParamStore as a tape leaf. The predicate
// decides which tensors participate in the gradient.
class TapeParams {
 public:
  TapeParams(ad::Tape& tape, const ParamStore& params,
             const std::function<bool(const std::string&)>& requires_grad);

  ad::Var at(const std::string& name) const;
  bool has(const std::string& name) const { return vars_.count(name) > 0; }

  // Collects gradients (after Tape::backward) into a store shaped like the
  // source parameters. Tensors outside the gradient get zeros.
  ParamStore grads(ad::Tape& tape) const;

 private:
  const ParamStore* params_;
  std::unordered_map<std::string, ad::Var> vars_;
};

}  // namespace mvsc
