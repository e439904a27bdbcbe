#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "miss/common.hpp"
#include "miss/constraints.hpp"
#include "miss/loss.hpp"
#include "miss/simplex.hpp"

namespace miss {

/// Ranges of the objective (V), loss (L) and model-size (R) variables.
/// Invariant: lower <= upper unless the region is empty; 0 <= r_min.
struct VariableBounds {
  double v_min = 0.0;
  double v_max = kInfinity;
  double l_min = 0.0;
  double l_max = kInfinity;
  int r_min = 0;
  int r_max = 0;

  bool Empty() const { return v_min > v_max || l_min > l_max || r_min > r_max; }
  friend bool operator==(const VariableBounds&, const VariableBounds&) = default;
};

/// Bounds valid before any search: V and L start at the objective of
/// lambda = 0 when that point is feasible, unbounded above otherwise.
VariableBounds InitialBounds(const SearchSpace& space, double c0);

enum class TightenOutcome { kUnchanged, kTightened, kEmpty };

/// Fixpoint of
///   V_max <- min(V_max, incumbent)          V_min <- max(V_min, best_bound)
///   L_max <- min(L_max, V_max - c0 R_min)   L_min <- max(L_min, V_min - c0 R_max)
///   R_max <- min(R_max, floor((V_max - L_min) / c0))
/// capped at 100 rounds. Never loosens a bound. kEmpty when a pair crosses.
TightenOutcome TightenBounds(VariableBounds* bounds, double c0, double incumbent,
                             double best_bound);

/// A simplex basis keyed by row identity, so it survives changes to the boxes
/// and to the set of cuts in the LP.
struct RelaxationBasis {
  std::vector<BasisStatus> columns;
  std::unordered_map<std::int64_t, BasisStatus> rows;
};

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0.0;  // V
  double loss = 0.0;       // L
  double size = 0.0;       // R
  RealMatrix lambda;
  RealMatrix alpha;           // D x K, row j-1 for feature row j
  std::vector<double> beta;   // D
  int iterations = 0;
  int rounds = 0;  // cut-generation rounds
  double max_violation = 0.0;
  std::shared_ptr<const RelaxationBasis> basis;  // final basis when optimal
};

/// The surrogate LP: minimize V subject to
///   V = L + c0 R,  R = sum_j beta_j,
///   lo'_jk alpha_jk <= lambda_jk <= hi'_jk alpha_jk   (feature rows),
///   alpha_jk <= beta_j,  beta_j <= sum_k alpha_jk,
///   L >= l(anchor_t) + <grad_t, lambda - anchor_t>     for every cut t,
/// where [lo, hi] is the entry's box and lo' = min(lo,0), hi' = max(hi,0).
/// Variable order: V, L, R, lambda (row-major), alpha (row-major), beta.
///
/// The loss is unchanged when a constant is added to a whole row, and
/// shifting row v by -round(mean(v)) stays inside any box containing 0
/// without growing the model. With `symmetry_breaking`, rows whose global box
/// contains 0 therefore also carry |sum_k lambda_jk| <= floor(K/2); the lattice
/// optimum is kept, but non-canonical points may be cut off. It is skipped
/// for force-included rows and when r_min > 0, where a constant nonzero row
/// counts toward the size.
class LpRelaxation {
 public:
  LpRelaxation(const SearchSpace& space, double c0, VariableBounds bounds,
               bool symmetry_breaking = false);

  static std::size_t VariableCount(std::size_t num_features, std::size_t num_classes);
  std::size_t num_variables() const { return VariableCount(d_, k_); }

  int LambdaVar(std::size_t j, std::size_t k) const { return 3 + static_cast<int>(j * k_ + k); }
  int AlphaVar(std::size_t j, std::size_t k) const {
    return 3 + static_cast<int>((d_ + 1) * k_ + (j - 1) * k_ + k);
  }
  int BetaVar(std::size_t j) const { return 3 + static_cast<int>((d_ + 1) * k_ + d_ * k_ + j - 1); }

  /// Appends a cut; returns false (and skips it) when an identical cut is
  /// already in the pool and `skip_duplicates` is set. Throws on non-finite cuts.
  bool AddCut(const Cut& cut, bool skip_duplicates = true);
  std::size_t num_cuts() const { return cut_offsets_.size(); }
  const std::vector<Cut>& cuts() const { return cuts_; }

  VariableBounds& bounds() { return bounds_; }
  const VariableBounds& bounds() const { return bounds_; }
  double c0() const { return c0_; }

  /// Solves the LP over `boxes` (defaults to the global boxes). Cuts enter
  /// lazily: the LP is re-solved with every violated cut until none remains,
  /// so the result is optimal for the full cut pool. The simplex restarts
  /// from `warm` (defaults to the basis of the previous solve).
  LpSolution Solve(const std::vector<IntBox>* boxes = nullptr,
                   std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt,
                   const RelaxationBasis* warm = nullptr);

  /// The full LP (every cut) in a CPLEX-style text format, for diagnostics.
  std::string ToLpFormat(const std::vector<IntBox>* boxes = nullptr) const;

 private:
  // Row keys are stable across builds: the index for structural rows, and
  // kCutKey + t for cut t.
  static constexpr std::int64_t kCutKey = std::int64_t{1} << 40;

  LinearProgram Build(const std::vector<IntBox>& boxes, const std::vector<std::size_t>& cuts,
                      std::vector<std::int64_t>* row_keys = nullptr) const;
  // `warm` mapped onto the rows of `lp`; empty when it does not fit.
  static Basis WarmStart(const RelaxationBasis& warm, const LinearProgram& lp,
                         const std::vector<std::int64_t>& row_keys);
  double CutValue(std::size_t t, const std::vector<double>& x) const;

  const SearchSpace& space_;
  double c0_;
  std::size_t d_;
  std::size_t k_;
  VariableBounds bounds_;
  bool symmetry_breaking_;
  std::vector<Cut> cuts_;
  // Dense rows of the pool: cut t reads L - grad_t . lambda >= offset_t.
  std::vector<std::vector<double>> cut_gradients_;
  std::vector<double> cut_offsets_;
  std::vector<bool> hot_;  // cuts that were binding in some solve
  std::shared_ptr<const RelaxationBasis> last_;
};

}  // namespace miss
