#include "core/tape.hpp"

#include <cmath>
#include <utility>

namespace mvsc::ad {

namespace {
constexpr double kLogFloor = 1e-12;

Tape* same_tape(Var a, Var b) {
  require(a.valid() && b.valid(), errc::internal, "tape op on invalid Var");
  require(a.tape() == b.tape(), errc::internal, "tape op mixes graphs");
  return a.tape();
}
}  // namespace

const Matrix& Var::value() const {
  require(valid(), errc::internal, "value() on invalid Var");
  return tape_->node(idx_).value;
}

double Var::scalar() const {
  const Matrix& v = value();
  require(v.rows() == 1 && v.cols() == 1, errc::internal, "scalar() on non-1x1 Var");
  return v(0, 0);
}

Var Tape::push(Matrix value, bool requires_grad,
               std::function<void(Tape&, const Matrix&)> bw) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.backward = std::move(bw);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::leaf(Matrix value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

void Tape::accumulate(int idx, const Matrix& g) {
  Node& n = node(idx);
  if (!n.requires_grad) return;
  if (!n.grad_ready) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    n.grad_ready = true;
  }
  n.grad += g;
}

double Tape::backward(Var output) {
  require(output.valid() && output.tape() == this, errc::internal,
          "backward() on foreign Var");
  const Matrix& v = node(output.index()).value;
  require(v.rows() == 1 && v.cols() == 1, errc::internal,
          "backward() requires a scalar output");
  // Reset grads from a previous pass.
  for (Node& n : nodes_) {
    n.grad_ready = false;
    n.grad.resize(0, 0);
  }
  Node& out = node(output.index());
  if (out.requires_grad) {
    out.grad = Matrix::Ones(1, 1);
    out.grad_ready = true;
  }
  for (int i = output.index(); i >= 0; --i) {
    Node& n = node(i);
    if (!n.requires_grad || !n.grad_ready || !n.backward) continue;
    n.backward(*this, n.grad);
  }
  return v(0, 0);
}

Matrix Tape::grad(Var v) const {
  require(v.valid() && v.tape() == this, errc::internal, "grad() on foreign Var");
  const Node& n = node(v.index());
  if (n.grad_ready) return n.grad;
  return Matrix::Zero(n.value.rows(), n.value.cols());
}

// --- op helpers -------------------------------------------------------------

struct OpAccess {
  static Var push(Tape& t, Matrix value, bool rg,
                  std::function<void(Tape&, const Matrix&)> bw) {
    return t.push(std::move(value), rg, std::move(bw));
  }
  static void accum(Tape& t, int idx, const Matrix& g) { t.accumulate(idx, g); }
  static const Matrix& value_of(Tape& t, int idx) { return t.node(idx).value; }
  static bool rg(Tape& t, int idx) { return t.node(idx).requires_grad; }
};

namespace {

bool needs_grad(Var a) { return OpAccess::rg(*a.tape(), a.index()); }

Var make_unary(Var a, Matrix value, std::function<Matrix(Tape&, const Matrix&)> pull) {
  Tape& t = *a.tape();
  const bool rg = needs_grad(a);
  const int pa = a.index();
  if (!rg) return OpAccess::push(t, std::move(value), false, nullptr);
  return OpAccess::push(t, std::move(value), true,
                        [pa, pull](Tape& tt, const Matrix& g) {
                          OpAccess::accum(tt, pa, pull(tt, g));
                        });
}

}  // namespace

// --- ops --------------------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  require(a.cols() == b.rows(), errc::invalid_argument, "matmul: inner dims differ");
  Matrix v = a.value() * b.value();
  const bool rg = needs_grad(a) || needs_grad(b);
  const int pa = a.index(), pb = b.index();
  if (!rg) return OpAccess::push(t, std::move(v), false, nullptr);
  return OpAccess::push(t, std::move(v), true, [pa, pb](Tape& tt, const Matrix& g) {
    OpAccess::accum(tt, pa, g * OpAccess::value_of(tt, pb).transpose());
    OpAccess::accum(tt, pb, OpAccess::value_of(tt, pa).transpose() * g);
  });
}

Var transpose(Var a) {
  return make_unary(a, a.value().transpose(),
                    [](Tape&, const Matrix& g) { return g.transpose(); });
}

Var add(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), errc::invalid_argument,
          "add: shape mismatch");
  Matrix v = a.value() + b.value();
  const bool rg = needs_grad(a) || needs_grad(b);
  const int pa = a.index(), pb = b.index();
  if (!rg) return OpAccess::push(t, std::move(v), false, nullptr);
  return OpAccess::push(t, std::move(v), true, [pa, pb](Tape& tt, const Matrix& g) {
    OpAccess::accum(tt, pa, g);
    OpAccess::accum(tt, pb, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), errc::invalid_argument,
          "sub: shape mismatch");
  Matrix v = a.value() - b.value();
  const bool rg = needs_grad(a) || needs_grad(b);
  const int pa = a.index(), pb = b.index();
  if (!rg) return OpAccess::push(t, std::move(v), false, nullptr);
  return OpAccess::push(t, std::move(v), true, [pa, pb](Tape& tt, const Matrix& g) {
    OpAccess::accum(tt, pa, g);
    OpAccess::accum(tt, pb, -g);
  });
}

Var add_rowvec(Var a, Var bias) {
  Tape& t = *same_tape(a, bias);
  require(bias.rows() == 1 && bias.cols() == a.cols(), errc::invalid_argument,
          "add_rowvec: bias must be 1 x cols");
  Matrix v = a.value().rowwise() + bias.value().row(0);
  const bool rg = needs_grad(a) || needs_grad(bias);
  const int pa = a.index(), pb = bias.index();
  if (!rg) return OpAccess::push(t, std::move(v), false, nullptr);
  return OpAccess::push(t, std::move(v), true, [pa, pb](Tape& tt, const Matrix& g) {
    OpAccess::accum(tt, pa, g);
    OpAccess::accum(tt, pb, g.colwise().sum());
  });
}

Var cmul(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  require(a.rows() == b.rows() && a.cols() == b.cols(), errc::invalid_argument,
          "cmul: shape mismatch");
  Matrix v = a.value().cwiseProduct(b.value());
  const bool rg = needs_grad(a) || needs_grad(b);
  const int pa = a.index(), pb = b.index();
  if (!rg) return OpAccess::push(t, std::move(v), false, nullptr);
  return OpAccess::push(t, std::move(v), true, [pa, pb](Tape& tt, const Matrix& g) {
    OpAccess::accum(tt, pa, g.cwiseProduct(OpAccess::value_of(tt, pb)));
    OpAccess::accum(tt, pb, g.cwiseProduct(OpAccess::value_of(tt, pa)));
  });
}

Var scale(Var a, double s) {
  return make_unary(a, a.value() * s,
                    [s](Tape&, const Matrix& g) -> Matrix { return g * s; });
}

Var add_scalar(Var a, double s) {
  return make_unary(a, a.value().array() + s,
                    [](Tape&, const Matrix& g) { return g; });
}

Var neg(Var a) { return scale(a, -1.0); }

Var square(Var a) {
  const int pa = a.index();
  return make_unary(a, a.value().array().square(),
                    [pa](Tape& tt, const Matrix& g) -> Matrix {
                      return 2.0 * g.cwiseProduct(OpAccess::value_of(tt, pa));
                    });
}

Var vexp(Var a) {
  const int pa = a.index();
  Matrix v = a.value().array().exp();
  Tape& t = *a.tape();
  if (!needs_grad(a)) return OpAccess::push(t, std::move(v), false, nullptr);
  const int self = static_cast<int>(t.size());  // index of the node we are about to push
  return OpAccess::push(t, std::move(v), true, [pa, self](Tape& tt, const Matrix& g) {
    OpAccess::accum(tt, pa, g.cwiseProduct(OpAccess::value_of(tt, self)));
  });
}

Var vtanh(Var a) {
  Tape& t = *a.tape();
  Matrix v = a.value().array().tanh();
  if (!needs_grad(a)) return OpAccess::push(t, std::move(v), false, nullptr);
  const int pa = a.index();
  const int self = static_cast<int>(t.size());
  return OpAccess::push(t, std::move(v), true, [pa, self](Tape& tt, const Matrix& g) {
    const Matrix& y = OpAccess::value_of(tt, self);
    OpAccess::accum(tt, pa, (g.array() * (1.0 - y.array().square())).matrix());
  });
}

Var elu(Var a) {
  const int pa = a.index();
  Matrix v = a.value().unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
  return make_unary(a, std::move(v), [pa](Tape& tt, const Matrix& g) -> Matrix {
    const Matrix& x = OpAccess::value_of(tt, pa);
    return g.cwiseProduct(
        x.unaryExpr([](double u) { return u > 0.0 ? 1.0 : std::exp(u); }));
  });
}

namespace {
inline double sigmoid1(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
}  // namespace

Var sigmoid(Var a) {
  Tape& t = *a.tape();
  Matrix v = a.value().unaryExpr([](double x) { return sigmoid1(x); });
  if (!needs_grad(a)) return OpAccess::push(t, std::move(v), false, nullptr);
  const int pa = a.index();
  const int self = static_cast<int>(t.size());
  return OpAccess::push(t, std::move(v), true, [pa, self](Tape& tt, const Matrix& g) {
    const Matrix& y = OpAccess::value_of(tt, self);
    OpAccess::accum(tt, pa, (g.array() * y.array() * (1.0 - y.array())).matrix());
  });
}

Var log_sigmoid(Var a) {
  const int pa = a.index();
  const double floor_log = std::log(kLogFloor);
  Matrix v = a.value().unaryExpr([floor_log](double x) {
    const double ls = x < 0.0 ? x - std::log1p(std::exp(x)) : -std::log1p(std::exp(-x));
    return std::max(ls, floor_log);
  });
  return make_unary(a, std::move(v), [pa, floor_log](Tape& tt, const Matrix& g) -> Matrix {
    const Matrix& x = OpAccess::value_of(tt, pa);
    return g.cwiseProduct(x.unaryExpr([floor_log](double u) {
      const double ls = u < 0.0 ? u - std::log1p(std::exp(u)) : -std::log1p(std::exp(-u));
      if (ls < floor_log) return 0.0;  // floored region
      return 1.0 - sigmoid1(u);
    }));
  });
}

Var clamp(Var a, double lo, double hi) {
  require(lo < hi, errc::invalid_argument, "clamp: lo must be < hi");
  const int pa = a.index();
  Matrix v = a.value().unaryExpr([lo, hi](double x) { return std::min(std::max(x, lo), hi); });
  return make_unary(a, std::move(v), [pa, lo, hi](Tape& tt, const Matrix& g) -> Matrix {
    const Matrix& x = OpAccess::value_of(tt, pa);
    Matrix out = g;
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        if (x(r, c) < lo || x(r, c) > hi) out(r, c) = 0.0;
    return out;
  });
}

Var concat_cols(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  require(a.rows() == b.rows(), errc::invalid_argument, "concat_cols: row mismatch");
  Matrix v(a.rows(), a.cols() + b.cols());
  v << a.value(), b.value();
  const bool rg = needs_grad(a) || needs_grad(b);
  const int pa = a.index(), pb = b.index();
  const int ca = a.cols(), cb = b.cols();
  if (!rg) return OpAccess::push(t, std::move(v), false, nullptr);
  return OpAccess::push(t, std::move(v), true,
                        [pa, pb, ca, cb](Tape& tt, const Matrix& g) {
                          OpAccess::accum(tt, pa, g.leftCols(ca));
                          OpAccess::accum(tt, pb, g.rightCols(cb));
                        });
}

Var permute_rows(Var a, std::vector<int> perm) {
  require(static_cast<int>(perm.size()) == a.rows(), errc::invalid_argument,
          "permute_rows: permutation size mismatch");
  const int pa = a.index();
  Matrix v(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r) v.row(r) = a.value().row(perm[static_cast<size_t>(r)]);
  return make_unary(a, std::move(v), [pa, perm](Tape& tt, const Matrix& g) -> Matrix {
    Matrix out = Matrix::Zero(g.rows(), g.cols());
    for (int r = 0; r < g.rows(); ++r) out.row(perm[static_cast<size_t>(r)]) += g.row(r);
    return out;
  });
}

Var zero_diag(Var a) {
  require(a.rows() == a.cols(), errc::invalid_argument, "zero_diag: matrix must be square");
  Matrix v = a.value();
  v.diagonal().setZero();
  return make_unary(a, std::move(v), [](Tape&, const Matrix& g) -> Matrix {
    Matrix out = g;
    out.diagonal().setZero();
    return out;
  });
}

Var sum_all(Var a) {
  const int ra = a.rows(), ca = a.cols();
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return make_unary(a, std::move(v), [ra, ca](Tape&, const Matrix& g) -> Matrix {
    return Matrix::Constant(ra, ca, g(0, 0));
  });
}

Var mean_all(Var a) {
  const double inv = 1.0 / (static_cast<double>(a.rows()) * a.cols());
  return scale(sum_all(a), inv);
}

Var sum_sq(Var a) {
  const int pa = a.index();
  Matrix v(1, 1);
  v(0, 0) = a.value().squaredNorm();
  return make_unary(a, std::move(v), [pa](Tape& tt, const Matrix& g) -> Matrix {
    return (2.0 * g(0, 0)) * OpAccess::value_of(tt, pa);
  });
}

Var stop_gradient(Var a) {
  return a.tape()->constant(a.value());
}

}  // namespace mvsc::ad
