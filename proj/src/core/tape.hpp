#pragma once

#include <functional>
#include <vector>

#include "core/common.hpp"

namespace mvsc::ad {

// Minimal reverse-mode autodiff over dense matrices. A Tape owns the nodes of
// one computation graph; ops append nodes and return lightweight Var handles.
// Scalars are 1x1 matrices. Graphs are rebuilt per evaluation, so nodes only
// live for one forward/backward pass.

class Tape;

class Var {
 public:
  Var() = default;
  bool valid() const { return tape_ != nullptr; }
  const Matrix& value() const;
  double scalar() const;  // value of a 1x1 node
  int rows() const { return static_cast<int>(value().rows()); }
  int cols() const { return static_cast<int>(value().cols()); }
  Tape* tape() const { return tape_; }
  int index() const { return idx_; }

 private:
  friend class Tape;
  Var(Tape* t, int i) : tape_(t), idx_(i) {}
  Tape* tape_ = nullptr;
  int idx_ = -1;
};

class Tape {
 public:
  Var leaf(Matrix value, bool requires_grad);
  Var constant(Matrix value) { return leaf(std::move(value), false); }

  // Runs reverse accumulation from a scalar output. Returns its value.
  double backward(Var output);

  // Gradient of the last backward() output w.r.t. `v` (zeros if untouched).
  Matrix grad(Var v) const;

  size_t size() const { return nodes_.size(); }

 private:
  friend class Var;
  friend struct OpAccess;

  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool grad_ready = false;  // grad allocated and seeded
    std::function<void(Tape&, const Matrix&)> backward;  // receives own grad
  };

  Var push(Matrix value, bool requires_grad, std::function<void(Tape&, const Matrix&)> bw);
  void accumulate(int idx, const Matrix& g);
  const Node& node(int idx) const { return nodes_[static_cast<size_t>(idx)]; }
  Node& node(int idx) { return nodes_[static_cast<size_t>(idx)]; }

  std::vector<Node> nodes_;
};

// --- ops ---
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var add_rowvec(Var a, Var bias);  // bias: 1 x cols, broadcast over rows
Var cmul(Var a, Var b);           // elementwise product
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var neg(Var a);
Var square(Var a);
Var vexp(Var a);
Var vtanh(Var a);
Var elu(Var a);
Var sigmoid(Var a);
Var log_sigmoid(Var a);  // log(max(sigmoid(x), 1e-12)), gradient 0 where floored
Var clamp(Var a, double lo, double hi);
Var concat_cols(Var a, Var b);
Var permute_rows(Var a, std::vector<int> perm);
Var zero_diag(Var a);
Var sum_all(Var a);   // 1x1
Var mean_all(Var a);  // 1x1
Var sum_sq(Var a);    // 1x1 squared Frobenius norm
Var stop_gradient(Var a);

}  // namespace mvsc::ad
