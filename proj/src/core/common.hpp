#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mvsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error categories. They map 1:1 onto the C API status codes and onto the
// CLI exit-code classes (validation / numeric / verification).
enum class errc {
  invalid_argument,
  io,
  format,
  nonfinite,
  numeric,
  verify,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace mvsc
