#include "miss/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "miss/common.hpp"

namespace miss {

int LinearProgram::AddVariable(double c, double lo, double hi) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return num_variables() - 1;
}

void LinearProgram::AddRow(std::vector<int> index, std::vector<double> value, double lo,
                           double hi) {
  if (index.size() != value.size()) throw Error("lp: row index/value length mismatch");
  rows.push_back(Row{std::move(index), std::move(value), lo, hi});
}

std::string_view ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
    case LpStatus::kTimeLimit: return "time_limit";
    case LpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kCostPerturbation = 1e-7;

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double Clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Columns: structural [0, n), slacks [n, n+m), artificials [n+m, total).
// Row i reads  sum_j a_ij x_j - s_i + sigma_i a_i = 0.
// Invariant: T = B^-1 A and x_B = B^-1 (-N x_N) up to rounding.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), opt_(options), m_(lp.num_rows()), n_(lp.num_variables()) {}

  LpResult Run() {
    if (!lp_.warm_start.empty() && SetupWarm()) {
      LpStatus s = LpStatus::kNumericalFailure;
      SetPhaseCosts(/*phase=*/2);
      if (DualFeasible()) {
        PerturbCosts();
        s = DualIterate();
        SetPhaseCosts(/*phase=*/2);
        if (s == LpStatus::kOptimal) s = Iterate();
      } else if (PrimalFeasible()) {
        s = Iterate();
      }
      // Infeasibility found by the dual is re-checked by the cold start.
      if (s == LpStatus::kOptimal || s == LpStatus::kUnbounded || s == LpStatus::kTimeLimit) {
        LpResult result = Finish(s);
        result.warm_started = true;
        if (result.status != LpStatus::kNumericalFailure) return result;
      }
      // The cold start gets its own iteration budget.
      warm_iterations_ = iterations_;
      iterations_ = 0;
    }
    Setup();
    if (num_art_ > 0) {
      SetPhaseCosts(/*phase=*/1);
      const LpStatus s = Iterate();
      if (s != LpStatus::kOptimal) return Finish(s);
      double infeasibility = 0.0;
      for (int a = n_ + m_; a < total_; ++a) infeasibility += x_[a];
      if (infeasibility > opt_.feasibility_tolerance) return Finish(LpStatus::kInfeasible);
      for (int a = n_ + m_; a < total_; ++a) {
        lb_[a] = 0.0;
        ub_[a] = 0.0;
        if (position_[a] < 0) x_[a] = 0.0;
      }
      DriveOutArtificials();
    }
    SetPhaseCosts(/*phase=*/2);
    return Finish(Iterate());
  }

 private:
  void Setup() {
    for (int j = 0; j < n_; ++j) {
      if (lp_.lower[j] > lp_.upper[j]) throw Error("lp: variable lower bound above upper bound");
    }
    std::vector<double> x0(n_);
    for (int j = 0; j < n_; ++j) {
      const double hint = j < static_cast<int>(lp_.start.size()) ? lp_.start[j] : 0.0;
      x0[j] = Clamp(hint, lp_.lower[j], lp_.upper[j]);
    }
    std::vector<double> activity(m_, 0.0);
    std::vector<double> target(m_, 0.0);
    std::vector<bool> needs_art(m_, false);
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      if (row.lower > row.upper) throw Error("lp: row lower bound above upper bound");
      double r = 0.0;
      for (std::size_t t = 0; t < row.index.size(); ++t) r += row.value[t] * x0[row.index[t]];
      activity[i] = r;
      if (r < row.lower - opt_.primal_tolerance) {
        needs_art[i] = true;
        target[i] = row.lower;
      } else if (r > row.upper + opt_.primal_tolerance) {
        needs_art[i] = true;
        target[i] = row.upper;
      }
    }
    num_art_ = static_cast<int>(std::count(needs_art.begin(), needs_art.end(), true));
    pivots_since_refactor_ = 0;
    total_ = n_ + m_ + num_art_;

    a_ = RowMajorMatrix::Zero(m_, total_);
    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    x_.assign(total_, 0.0);
    position_.assign(total_, -1);
    basis_.assign(m_, -1);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lp_.lower[j];
      ub_[j] = lp_.upper[j];
      x_[j] = x0[j];
    }
    int art = n_ + m_;
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      for (std::size_t t = 0; t < row.index.size(); ++t) {
        const int j = row.index[t];
        if (j < 0 || j >= n_) throw Error("lp: row references unknown variable");
        a_(i, j) += row.value[t];
      }
      const int s = n_ + i;
      a_(i, s) = -1.0;
      lb_[s] = row.lower;
      ub_[s] = row.upper;
      if (!needs_art[i]) {
        x_[s] = activity[i];
        basis_[i] = s;
      } else {
        // Slack sits at the violated bound; the artificial absorbs the gap.
        x_[s] = target[i];
        const double gap = target[i] - activity[i];
        const double sigma = gap > 0 ? 1.0 : -1.0;
        a_(i, art) = sigma;
        lb_[art] = 0.0;
        ub_[art] = kInfinity;
        x_[art] = std::abs(gap);
        basis_[i] = art;
        ++art;
      }
      position_[basis_[i]] = i;
    }
    // The starting basis is diagonal, so the tableau is a row scaling of A.
    t_ = a_;
    for (int i = 0; i < m_; ++i) t_.row(i) /= a_(i, basis_[i]);
    cost_.assign(total_, 0.0);
  }

  // Columns and rows from lp_.warm_start; false when the hint does not give a
  // usable basis.
  bool SetupWarm() {
    const Basis& hint = lp_.warm_start;
    if (static_cast<int>(hint.columns.size()) != n_ || static_cast<int>(hint.rows.size()) != m_) {
      return false;
    }
    num_art_ = 0;
    total_ = n_ + m_;
    a_ = RowMajorMatrix::Zero(m_, total_);
    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    x_.assign(total_, 0.0);
    position_.assign(total_, -1);
    cost_.assign(total_, 0.0);
    basis_.clear();
    for (int j = 0; j < n_; ++j) {
      if (lp_.lower[j] > lp_.upper[j]) throw Error("lp: variable lower bound above upper bound");
      lb_[j] = lp_.lower[j];
      ub_[j] = lp_.upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      if (row.lower > row.upper) throw Error("lp: row lower bound above upper bound");
      for (std::size_t t = 0; t < row.index.size(); ++t) {
        const int j = row.index[t];
        if (j < 0 || j >= n_) throw Error("lp: row references unknown variable");
        a_(i, j) += row.value[t];
      }
      a_(i, n_ + i) = -1.0;
      lb_[n_ + i] = row.lower;
      ub_[n_ + i] = row.upper;
    }
    for (int j = 0; j < total_; ++j) {
      const BasisStatus status = j < n_ ? hint.columns[j] : hint.rows[j - n_];
      if (status == BasisStatus::kBasic) {
        if (static_cast<int>(basis_.size()) == m_) return false;
        position_[j] = static_cast<int>(basis_.size());
        basis_.push_back(j);
        continue;
      }
      // Nonbasic columns rest on a finite bound, the hinted one when possible.
      const bool upper = status == BasisStatus::kAtUpper;
      if (upper ? ub_[j] < kInfinity : lb_[j] > -kInfinity) {
        x_[j] = upper ? ub_[j] : lb_[j];
      } else if (lb_[j] > -kInfinity) {
        x_[j] = lb_[j];
      } else if (ub_[j] < kInfinity) {
        x_[j] = ub_[j];
      }
    }
    if (static_cast<int>(basis_.size()) != m_) return false;
    return Refactor(/*threshold=*/1e-11);
  }

  bool PrimalFeasible() const {
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      if (x_[b] < lb_[b] - opt_.primal_tolerance || x_[b] > ub_[b] + opt_.primal_tolerance) {
        return false;
      }
    }
    return true;
  }

  bool DualFeasible() const {
    for (int j = 0; j < total_; ++j) {
      if (position_[j] >= 0 || lb_[j] == ub_[j]) continue;
      const double dj = d_(j);
      if (dj < -opt_.optimality_tolerance && x_[j] < ub_[j]) return false;
      if (dj > opt_.optimality_tolerance && x_[j] > lb_[j]) return false;
    }
    return true;
  }

  // Spreads the reduced costs of nonbasic columns away from zero, in their
  // dual feasible direction, so the dual ratio test has few ties. The true
  // costs are restored before optimality is declared.
  void PerturbCosts() {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.5, 1.0);
    for (int j = 0; j < total_; ++j) {
      if (position_[j] >= 0 || lb_[j] == ub_[j]) continue;
      const double delta = kCostPerturbation * unit(rng);
      double shift = 0.0;
      if (x_[j] <= lb_[j]) {
        shift = d_(j) < delta ? delta - d_(j) : 0.0;
      } else if (x_[j] >= ub_[j]) {
        shift = d_(j) > -delta ? -delta - d_(j) : 0.0;
      }
      cost_[j] += shift;
      d_(j) += shift;
    }
  }

  // Basic row with the largest bound violation; -1 when primal feasible.
  int DualPrice(double* target) const {
    int best = -1;
    double best_violation = opt_.primal_tolerance;
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      const double below = lb_[b] - x_[b];
      const double above = x_[b] - ub_[b];
      const double violation = std::max(below, above);
      if (violation > best_violation) {
        best_violation = violation;
        best = i;
        *target = below > above ? lb_[b] : ub_[b];
      }
    }
    return best;
  }

  // Entering column for leaving row r moving toward `target`, -1 when the
  // row cannot be repaired (the LP is infeasible). Boxed columns whose
  // breakpoint is passed before the row becomes feasible go to `flips`: they
  // jump to their opposite bound, which keeps them dual feasible.
  int DualRatioTest(int r, double target, std::vector<int>* flips) const {
    struct Breakpoint {
      double ratio;
      double mag;
      int column;
    };
    const int b = basis_[r];
    // x_b = -sum_j t_rj x_j: raising x_b needs a nonbasic move against t_rj.
    const double sign = target > x_[b] ? 1.0 : -1.0;
    std::vector<Breakpoint> points;
    for (int j = 0; j < total_; ++j) {
      if (position_[j] >= 0 || lb_[j] == ub_[j]) continue;
      const double a = -sign * t_(r, j);  // gain of x_b per unit increase of x_j
      if (std::abs(a) <= opt_.pivot_tolerance) continue;
      if (a > 0 && !(x_[j] < ub_[j])) continue;
      if (a < 0 && !(x_[j] > lb_[j])) continue;
      const double dj = a > 0 ? std::max(d_(j), 0.0) : std::max(-d_(j), 0.0);
      points.push_back({dj / std::abs(a), std::abs(a), j});
    }
    std::sort(points.begin(), points.end(), [](const Breakpoint& p, const Breakpoint& q) {
      return p.ratio < q.ratio || (p.ratio == q.ratio && p.column < q.column);
    });
    double remaining = std::abs(target - x_[b]);
    std::size_t first = 0;
    for (; first < points.size(); ++first) {
      const int j = points[first].column;
      const double reach = points[first].mag * (ub_[j] - lb_[j]);
      if (!(reach < remaining)) break;  // also stops on unbounded ranges
      remaining -= reach;
    }
    if (first == points.size()) return -1;
    // Among breakpoints tied within the optimality tolerance, the largest pivot.
    int enter = -1;
    double best_pivot = 0.0;
    std::size_t chosen = first;
    for (std::size_t p = first; p < points.size(); ++p) {
      if (points[p].ratio > points[first].ratio + opt_.optimality_tolerance / points[p].mag) break;
      if (points[p].mag > best_pivot) {
        best_pivot = points[p].mag;
        enter = points[p].column;
        chosen = p;
      }
    }
    flips->clear();
    for (std::size_t p = 0; p < first; ++p) {
      if (p != chosen) flips->push_back(points[p].column);
    }
    return enter;
  }

  LpStatus DualIterate() {
    // A stalled dual hands over to the cold start instead of cycling.
    const int limit = std::min(opt_.max_iterations, 10 * (m_ + total_));
    std::vector<int> flips;
    while (true) {
      if (iterations_ >= limit) return LpStatus::kIterationLimit;
      if (opt_.deadline && (iterations_ & 31) == 0 &&
          std::chrono::steady_clock::now() >= *opt_.deadline) {
        return LpStatus::kTimeLimit;
      }
      if (pivots_since_refactor_ >= opt_.refactor_interval && !Refactor()) {
        return LpStatus::kNumericalFailure;
      }
      double target = 0.0;
      int r = DualPrice(&target);
      if (r < 0 && pivots_since_refactor_ > 0) {
        if (!Refresh()) return LpStatus::kNumericalFailure;
        r = DualPrice(&target);
      }
      if (r < 0) return LpStatus::kOptimal;
      const int q = DualRatioTest(r, target, &flips);
      if (q < 0) return LpStatus::kInfeasible;
      ++iterations_;
      for (int j : flips) {
        const double to = x_[j] <= lb_[j] ? ub_[j] : lb_[j];
        const double step = to - x_[j];
        x_[j] = to;
        for (int i = 0; i < m_; ++i) x_[basis_[i]] -= step * t_(i, j);
      }
      const int leaving = basis_[r];
      const double step = (x_[leaving] - target) / t_(r, q);
      x_[q] += step;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= step * t_(i, q);
      x_[leaving] = target;
      Pivot(r, q);
    }
  }

  void SetPhaseCosts(int phase) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    if (phase == 1) {
      for (int a = n_ + m_; a < total_; ++a) cost_[a] = 1.0;
    } else {
      for (int j = 0; j < n_; ++j) cost_[j] = lp_.cost[j];
    }
    ComputeReducedCosts();
  }

  void ComputeReducedCosts() {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(cost_.data(), total_);
    d_ = c - t_.transpose() * cb;
    for (int i = 0; i < m_; ++i) d_(basis_[i]) = 0.0;
  }

  bool Refactor(double threshold = 1e-13) {
    pivots_since_refactor_ = 0;
    if (m_ == 0) {
      ComputeReducedCosts();
      return true;
    }
    Eigen::MatrixXd b(m_, m_);
    for (int i = 0; i < m_; ++i) b.col(i) = a_.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    if (!(lu.rcond() > threshold)) return false;
    t_ = lu.solve(Eigen::MatrixXd(a_));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j) {
      if (position_[j] >= 0 || x_[j] == 0.0) continue;
      rhs -= a_.col(j) * x_[j];
    }
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb(i);
    ComputeReducedCosts();
    return t_.allFinite();
  }

  // Recomputes x_B and the reduced costs from a fresh LU of the basis,
  // leaving the tableau as is. Cheaper than Refactor for confirming optimality.
  bool Refresh() {
    if (m_ == 0) return true;
    Eigen::MatrixXd b(m_, m_);
    for (int i = 0; i < m_; ++i) b.col(i) = a_.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    if (!(lu.rcond() > 1e-13)) return false;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    Eigen::VectorXd cb(m_);
    for (int j = 0; j < total_; ++j) {
      if (position_[j] >= 0 || x_[j] == 0.0) continue;
      rhs -= a_.col(j) * x_[j];
    }
    for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb(i);
    const Eigen::VectorXd y = lu.transpose().solve(cb);
    d_ = Eigen::Map<const Eigen::VectorXd>(cost_.data(), total_) - a_.transpose() * y;
    for (int i = 0; i < m_; ++i) d_(basis_[i]) = 0.0;
    return xb.allFinite() && d_.allFinite();
  }

  // Entering column and direction (+1 increase, -1 decrease); -1 if optimal.
  int Price(int* direction) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
      if (position_[j] >= 0) continue;
      if (lb_[j] == ub_[j]) continue;
      const double dj = d_(j);
      int dir = 0;
      if (dj < -opt_.optimality_tolerance && x_[j] < ub_[j] - opt_.primal_tolerance) {
        dir = 1;
      } else if (dj > opt_.optimality_tolerance && x_[j] > lb_[j] + opt_.primal_tolerance) {
        dir = -1;
      }
      if (dir == 0) continue;
      if (bland_) {
        *direction = dir;
        return j;
      }
      const double score = std::abs(dj);
      if (score > best_score) {
        best_score = score;
        best = j;
        *direction = dir;
      }
    }
    return best;
  }

  // Leaving row (-1 for a bound flip, -2 if unbounded) and the step length.
  int RatioTest(int q, int dir, double* step) const {
    const double own = dir > 0 ? ub_[q] - x_[q] : x_[q] - lb_[q];
    const double delta = bland_ ? 0.0 : opt_.primal_tolerance;
    // Pass 1: largest step keeping every basic within its bounds widened by delta.
    double theta_max = kInfinity;
    for (int i = 0; i < m_; ++i) {
      const double a = dir * t_(i, q);
      if (std::abs(a) <= opt_.pivot_tolerance) continue;
      const int b = basis_[i];
      double r = kInfinity;
      if (a > 0 && lb_[b] > -kInfinity) r = (x_[b] - lb_[b] + delta) / a;
      if (a < 0 && ub_[b] < kInfinity) r = (ub_[b] - x_[b] + delta) / -a;
      theta_max = std::min(theta_max, r);
    }
    if (own <= theta_max) {
      if (own == kInfinity) return -2;
      *step = own;
      return -1;
    }
    // Pass 2: among rows blocking within theta_max, take the largest pivot.
    int leave = -1;
    double best_pivot = 0.0;
    double best_ratio = kInfinity;
    for (int i = 0; i < m_; ++i) {
      const double a = dir * t_(i, q);
      if (std::abs(a) <= opt_.pivot_tolerance) continue;
      const int b = basis_[i];
      double r = kInfinity;
      if (a > 0 && lb_[b] > -kInfinity) r = (x_[b] - lb_[b]) / a;
      if (a < 0 && ub_[b] < kInfinity) r = (ub_[b] - x_[b]) / -a;
      if (r > theta_max) continue;
      const double mag = std::abs(a);
      bool better;
      if (bland_) {
        better = leave < 0 || r < best_ratio ||
                 (r == best_ratio && basis_[i] < basis_[leave]);
      } else {
        better = mag > best_pivot;
      }
      if (better) {
        leave = i;
        best_pivot = mag;
        best_ratio = r;
      }
    }
    if (leave < 0) return -2;
    *step = std::max(best_ratio, 0.0);
    return leave;
  }

  void Pivot(int r, int q) {
    const double piv = t_(r, q);
    t_.row(r) /= piv;
    Eigen::VectorXd col = t_.col(q);
    col(r) = 0.0;
    t_.noalias() -= col * t_.row(r);
    const double dq = d_(q);
    d_ -= dq * t_.row(r).transpose();
    d_(q) = 0.0;
    const int leaving = basis_[r];
    position_[leaving] = -1;
    basis_[r] = q;
    position_[q] = r;
    ++pivots_since_refactor_;
  }

  LpStatus Iterate() {
    int degenerate_run = 0;
    bland_ = false;
    bool fresh = false;  // no pivots since the last refactor
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::kIterationLimit;
      if (opt_.deadline && (iterations_ & 31) == 0 &&
          std::chrono::steady_clock::now() >= *opt_.deadline) {
        return LpStatus::kTimeLimit;
      }
      if (pivots_since_refactor_ >= opt_.refactor_interval) {
        if (!Refactor()) return LpStatus::kNumericalFailure;
        fresh = true;
      }
      int dir = 0;
      const int q = Price(&dir);
      if (q < 0) {
        if (fresh) return LpStatus::kOptimal;
        if (!Refresh()) return LpStatus::kNumericalFailure;
        fresh = true;
        continue;
      }
      double step = 0.0;
      const int r = RatioTest(q, dir, &step);
      if (r == -2) return LpStatus::kUnbounded;
      ++iterations_;
      fresh = false;
      const double signed_step = dir * step;
      if (step != 0.0) {
        x_[q] += signed_step;
        for (int i = 0; i < m_; ++i) x_[basis_[i]] -= signed_step * t_(i, q);
      }
      if (r == -1) {
        x_[q] = dir > 0 ? ub_[q] : lb_[q];
        // Flips count as progress for cycling purposes.
        degenerate_run = 0;
        bland_ = false;
        continue;
      }
      const int leaving = basis_[r];
      x_[leaving] = dir * t_(r, q) > 0 ? lb_[leaving] : ub_[leaving];
      Pivot(r, q);
      if (step <= opt_.primal_tolerance) {
        if (++degenerate_run >= opt_.degenerate_pivots_before_bland) bland_ = true;
      } else {
        degenerate_run = 0;
        bland_ = false;
      }
    }
  }

  // Pivots zero-valued basic artificials out where a non-artificial column allows it.
  void DriveOutArtificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_ + m_) continue;
      int best = -1;
      double best_mag = 1e-7;
      for (int j = 0; j < n_ + m_; ++j) {
        if (position_[j] >= 0) continue;
        const double mag = std::abs(t_(i, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      if (best >= 0) {
        const int art = basis_[i];
        Pivot(i, best);
        x_[art] = 0.0;
      }
    }
    Refactor();
  }

  LpResult Finish(LpStatus status) {
    LpResult result;
    result.status = status;
    result.iterations = warm_iterations_ + iterations_;
    result.x.assign(x_.begin(), x_.begin() + n_);
    result.activity.assign(m_, 0.0);
    double violation = 0.0;
    for (int j = 0; j < n_; ++j) {
      violation = std::max({violation, lp_.lower[j] - result.x[j], result.x[j] - lp_.upper[j]});
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      double r = 0.0;
      for (std::size_t t = 0; t < row.index.size(); ++t) r += row.value[t] * result.x[row.index[t]];
      result.activity[i] = r;
      violation = std::max({violation, row.lower - r, r - row.upper});
    }
    result.max_violation = violation;
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += lp_.cost[j] * result.x[j];
    result.objective = obj;
    if (status == LpStatus::kOptimal && !(violation <= opt_.feasibility_tolerance)) {
      result.status = LpStatus::kNumericalFailure;
    }
    if (result.status == LpStatus::kOptimal) result.basis = CurrentBasis();
    return result;
  }

  // Empty while an artificial is still basic.
  Basis CurrentBasis() const {
    Basis basis;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= n_ + m_) return basis;
    }
    basis.columns.resize(n_);
    basis.rows.resize(m_);
    for (int j = 0; j < n_ + m_; ++j) {
      BasisStatus status = BasisStatus::kBasic;
      if (position_[j] < 0) {
        const bool upper = ub_[j] < kInfinity &&
                           std::abs(x_[j] - ub_[j]) < std::abs(x_[j] - lb_[j]);
        status = upper ? BasisStatus::kAtUpper : BasisStatus::kAtLower;
      }
      (j < n_ ? basis.columns[j] : basis.rows[j - n_]) = status;
    }
    return basis;
  }

  const LinearProgram& lp_;
  const SimplexOptions& opt_;
  int m_;
  int n_;
  int num_art_ = 0;
  int total_ = 0;
  RowMajorMatrix a_;
  RowMajorMatrix t_;
  Eigen::VectorXd d_;
  std::vector<double> cost_;
  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<double> x_;
  std::vector<int> basis_;
  std::vector<int> position_;
  int iterations_ = 0;
  int warm_iterations_ = 0;
  int pivots_since_refactor_ = 0;
  bool bland_ = false;
};

}  // namespace

LpResult SolveLinearProgram(const LinearProgram& lp, const SimplexOptions& options) {
  if (lp.lower.size() != lp.cost.size() || lp.upper.size() != lp.cost.size()) {
    throw Error("lp: bound vectors do not match the number of variables");
  }
  BoundedSimplex simplex(lp, options);
  return simplex.Run();
}

}  // namespace miss
