#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace miss {

/// Real-valued coefficient matrix, (D+1) x K. Row 0 holds per-class biases.
using RealMatrix = Eigen::MatrixXd;
/// Integer coefficient matrix, (D+1) x K. Row 0 holds per-class biases.
using IntMatrix = Eigen::MatrixXi;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// User constraints admit no integer-feasible model.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Closed integer interval [lo, hi].
struct IntBox {
  int lo = 0;
  int hi = 0;

  bool Contains(int v) const { return lo <= v && v <= hi; }
  bool ContainsZero() const { return lo <= 0 && 0 <= hi; }
  int Width() const { return hi - lo; }
  friend bool operator==(const IntBox&, const IntBox&) = default;
};

}  // namespace miss
