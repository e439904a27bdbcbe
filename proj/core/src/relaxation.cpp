#include "miss/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace miss {
namespace {

constexpr double kCutViolation = 1e-9;
constexpr double kBindingSlack = 1e-7;
constexpr std::size_t kMaxCutsPerRound = 50;
constexpr int kMaxTightenRounds = 100;

}  // namespace

VariableBounds InitialBounds(const SearchSpace& space, double c0) {
  VariableBounds b;
  b.r_min = space.r_min();
  b.r_max = space.r_max();
  if (space.ZeroIsFeasible()) {
    const double ln_k = std::log(static_cast<double>(space.num_classes()));
    b.l_max = ln_k;
    b.v_max = ln_k + c0 * b.r_max;
  }
  return b;
}

TightenOutcome TightenBounds(VariableBounds* bounds, double c0, double incumbent,
                             double best_bound) {
  VariableBounds& b = *bounds;
  const VariableBounds before = b;
  for (int round = 0; round < kMaxTightenRounds; ++round) {
    const VariableBounds last = b;
    b.v_max = std::min(b.v_max, incumbent);
    b.v_min = std::max(b.v_min, best_bound);
    b.l_max = std::min(b.l_max, b.v_max - c0 * b.r_min);
    b.l_min = std::max(b.l_min, b.v_min - c0 * b.r_max);
    if (std::isfinite(b.v_max)) {
      // The absolute slack keeps floating-point noise from excluding a tie.
      const double q = std::floor((b.v_max - b.l_min + 1e-12) / c0);
      if (q < static_cast<double>(b.r_max)) b.r_max = static_cast<int>(std::max(q, -1.0));
    }
    if (b.Empty()) return TightenOutcome::kEmpty;
    if (b == last) break;
  }
  return b == before ? TightenOutcome::kUnchanged : TightenOutcome::kTightened;
}

LpRelaxation::LpRelaxation(const SearchSpace& space, double c0, VariableBounds bounds,
                           bool symmetry_breaking)
    : space_(space),
      c0_(c0),
      d_(space.num_features()),
      k_(space.num_classes()),
      bounds_(bounds),
      symmetry_breaking_(symmetry_breaking) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw Error("relaxation: c0 must be positive");
  if (bounds.Empty() || bounds.r_min < 0 || bounds.r_max > static_cast<int>(d_)) {
    throw Error("relaxation: invalid variable bounds");
  }
}

std::size_t LpRelaxation::VariableCount(std::size_t num_features, std::size_t num_classes) {
  return 3 + (num_features + 1) * num_classes + num_features * num_classes + num_features;
}

bool LpRelaxation::AddCut(const Cut& cut, bool skip_duplicates) {
  if (static_cast<std::size_t>(cut.gradient.rows()) != d_ + 1 ||
      static_cast<std::size_t>(cut.gradient.cols()) != k_) {
    throw Error("relaxation: cut shape does not match the problem");
  }
  const double offset = cut.Offset();
  if (!std::isfinite(offset) || !cut.gradient.allFinite()) {
    throw Error("relaxation: non-finite cut");
  }
  std::vector<double> g((d_ + 1) * k_);
  for (std::size_t j = 0; j <= d_; ++j) {
    for (std::size_t k = 0; k < k_; ++k) {
      g[j * k_ + k] = cut.gradient(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }
  }
  if (skip_duplicates) {
    for (std::size_t t = 0; t < cut_offsets_.size(); ++t) {
      if (cut_offsets_[t] == offset && cut_gradients_[t] == g) return false;
    }
  }
  cuts_.push_back(cut);
  cut_gradients_.push_back(std::move(g));
  cut_offsets_.push_back(offset);
  hot_.push_back(true);
  return true;
}

double LpRelaxation::CutValue(std::size_t t, const std::vector<double>& x) const {
  const auto& g = cut_gradients_[t];
  double v = cut_offsets_[t];
  for (std::size_t e = 0; e < g.size(); ++e) v += g[e] * x[3 + e];
  return v;
}

LinearProgram LpRelaxation::Build(const std::vector<IntBox>& boxes,
                                  const std::vector<std::size_t>& cuts,
                                  std::vector<std::int64_t>* row_keys) const {
  LinearProgram lp;
  lp.AddVariable(1.0, bounds_.v_min, bounds_.v_max);
  lp.AddVariable(0.0, bounds_.l_min, bounds_.l_max);
  lp.AddVariable(0.0, bounds_.r_min, bounds_.r_max);
  for (std::size_t e = 0; e < (d_ + 1) * k_; ++e) lp.AddVariable(0.0, boxes[e].lo, boxes[e].hi);
  for (std::size_t j = 1; j <= d_; ++j) {
    for (std::size_t k = 0; k < k_; ++k) {
      const IntBox& b = boxes[j * k_ + k];
      const double lo = b.ContainsZero() ? 0.0 : 1.0;
      const double hi = b == IntBox{0, 0} ? 0.0 : 1.0;
      lp.AddVariable(0.0, lo, hi);
    }
  }
  for (std::size_t j = 1; j <= d_; ++j) {
    lp.AddVariable(0.0, space_.forced_in(j) ? 1.0 : 0.0, space_.forced_out(j) ? 0.0 : 1.0);
  }

  lp.AddRow({0, 1, 2}, {1.0, -1.0, -c0_}, 0.0, 0.0);
  {
    std::vector<int> idx{2};
    std::vector<double> val{1.0};
    for (std::size_t j = 1; j <= d_; ++j) {
      idx.push_back(BetaVar(j));
      val.push_back(-1.0);
    }
    lp.AddRow(std::move(idx), std::move(val), 0.0, 0.0);
  }
  for (std::size_t j = 1; j <= d_; ++j) {
    for (std::size_t k = 0; k < k_; ++k) {
      const IntBox& b = boxes[j * k_ + k];
      const double hi = std::max(b.hi, 0);
      const double lo = std::min(b.lo, 0);
      // Both links are always present (possibly with a zero coefficient) so
      // the row set does not depend on the boxes.
      lp.AddRow({LambdaVar(j, k), AlphaVar(j, k)}, {1.0, -hi}, -kInfinity, 0.0);
      lp.AddRow({LambdaVar(j, k), AlphaVar(j, k)}, {1.0, -lo}, 0.0, kInfinity);
      lp.AddRow({AlphaVar(j, k), BetaVar(j)}, {1.0, -1.0}, -kInfinity, 0.0);
    }
    std::vector<int> idx{BetaVar(j)};
    std::vector<double> val{1.0};
    for (std::size_t k = 0; k < k_; ++k) {
      idx.push_back(AlphaVar(j, k));
      val.push_back(-1.0);
    }
    lp.AddRow(std::move(idx), std::move(val), -kInfinity, 0.0);
  }
  if (symmetry_breaking_ && space_.r_min() == 0) {
    const double half = static_cast<double>(k_ / 2);
    for (std::size_t j = 0; j <= d_; ++j) {
      if (j > 0 && space_.forced_in(j)) continue;
      bool zero_in_box = true;
      for (std::size_t k = 0; k < k_; ++k) zero_in_box = zero_in_box && space_.box(j, k).ContainsZero();
      if (!zero_in_box) continue;
      std::vector<int> idx;
      for (std::size_t k = 0; k < k_; ++k) idx.push_back(LambdaVar(j, k));
      lp.AddRow(std::move(idx), std::vector<double>(k_, 1.0), -half, half);
    }
  }
  if (row_keys != nullptr) {
    row_keys->clear();
    for (int i = 0; i < lp.num_rows(); ++i) row_keys->push_back(i);
    for (std::size_t t : cuts) row_keys->push_back(kCutKey + static_cast<std::int64_t>(t));
  }
  for (std::size_t t : cuts) {
    std::vector<int> idx{1};
    std::vector<double> val{1.0};
    const auto& g = cut_gradients_[t];
    for (std::size_t e = 0; e < g.size(); ++e) {
      if (g[e] == 0.0) continue;
      idx.push_back(3 + static_cast<int>(e));
      val.push_back(-g[e]);
    }
    lp.AddRow(std::move(idx), std::move(val), cut_offsets_[t], kInfinity);
  }
  return lp;
}

Basis LpRelaxation::WarmStart(const RelaxationBasis& warm, const LinearProgram& lp,
                              const std::vector<std::int64_t>& row_keys) {
  Basis basis;
  if (warm.columns.size() != static_cast<std::size_t>(lp.num_variables())) return basis;
  basis.columns = warm.columns;
  int basic = 0;
  for (BasisStatus s : basis.columns) basic += s == BasisStatus::kBasic;
  for (std::int64_t key : row_keys) {
    const auto it = warm.rows.find(key);
    // Rows new to the LP enter with their slack basic.
    const BasisStatus s = it == warm.rows.end() ? BasisStatus::kBasic : it->second;
    basis.rows.push_back(s);
    basic += s == BasisStatus::kBasic;
  }
  if (basic != lp.num_rows()) return Basis{};
  return basis;
}

LpSolution LpRelaxation::Solve(const std::vector<IntBox>* boxes,
                               std::optional<std::chrono::steady_clock::time_point> deadline,
                               const RelaxationBasis* warm) {
  const std::vector<IntBox>& local = boxes != nullptr ? *boxes : space_.boxes();
  if (local.size() != (d_ + 1) * k_) throw Error("relaxation: box count does not match the problem");
  LpSolution sol;
  for (const IntBox& b : local) {
    if (b.lo > b.hi) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
  }
  if (bounds_.Empty()) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }

  const RelaxationBasis* start = warm != nullptr ? warm : last_.get();
  std::shared_ptr<const RelaxationBasis> basis;
  std::vector<bool> in_lp(cut_offsets_.size(), false);
  std::vector<std::size_t> active;
  for (std::size_t t = 0; t < cut_offsets_.size(); ++t) {
    // Cuts that are nonbasic in the starting basis must be rows of the LP.
    bool in_basis = false;
    if (start != nullptr) {
      const auto it = start->rows.find(kCutKey + static_cast<std::int64_t>(t));
      in_basis = it != start->rows.end() && it->second != BasisStatus::kBasic;
    }
    if (hot_[t] || in_basis) {
      in_lp[t] = true;
      active.push_back(t);
    }
  }
  SimplexOptions options;
  options.deadline = deadline;
  LpResult res;
  std::vector<std::int64_t> keys;
  while (true) {
    LinearProgram lp = Build(local, active, &keys);
    lp.start = res.x;
    if (start != nullptr) lp.warm_start = WarmStart(*start, lp, keys);
    res = SolveLinearProgram(lp, options);
    if (!res.basis.empty()) {
      auto next = std::make_shared<RelaxationBasis>();
      next->columns = std::move(res.basis.columns);
      for (std::size_t i = 0; i < keys.size(); ++i) next->rows.emplace(keys[i], res.basis.rows[i]);
      basis = std::move(next);
      start = basis.get();
    }
    sol.iterations += res.iterations;
    ++sol.rounds;
    if (res.status != LpStatus::kOptimal) {
      sol.status = res.status;
      return sol;
    }
    std::vector<std::pair<double, std::size_t>> violated;
    const double l = res.x[1];
    for (std::size_t t = 0; t < cut_offsets_.size(); ++t) {
      if (in_lp[t]) continue;
      const double v = CutValue(t, res.x) - l;
      if (v > kCutViolation) violated.emplace_back(-v, t);
    }
    if (violated.empty()) break;
    std::sort(violated.begin(), violated.end());
    if (violated.size() > kMaxCutsPerRound) violated.resize(kMaxCutsPerRound);
    for (const auto& [neg, t] : violated) {
      in_lp[t] = true;
      active.push_back(t);
    }
  }

  const double l = res.x[1];
  for (std::size_t t : active) hot_[t] = CutValue(t, res.x) - l > -kBindingSlack;
  // The newest cut stays in the working set so the next solve sees it.
  if (!hot_.empty()) hot_.back() = true;

  last_ = basis;
  sol.basis = basis;
  sol.status = LpStatus::kOptimal;
  sol.objective = res.objective;
  sol.loss = res.x[1];
  sol.size = res.x[2];
  sol.max_violation = res.max_violation;
  sol.lambda.resize(static_cast<Eigen::Index>(d_ + 1), static_cast<Eigen::Index>(k_));
  sol.alpha.resize(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(k_));
  sol.beta.assign(d_, 0.0);
  for (std::size_t j = 0; j <= d_; ++j) {
    for (std::size_t k = 0; k < k_; ++k) {
      sol.lambda(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = res.x[LambdaVar(j, k)];
      if (j > 0) {
        sol.alpha(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k)) =
            res.x[AlphaVar(j, k)];
      }
    }
    if (j > 0) sol.beta[j - 1] = res.x[BetaVar(j)];
  }
  return sol;
}

std::string LpRelaxation::ToLpFormat(const std::vector<IntBox>* boxes) const {
  const std::vector<IntBox>& local = boxes != nullptr ? *boxes : space_.boxes();
  std::vector<std::size_t> all(cut_offsets_.size());
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = t;
  const LinearProgram lp = Build(local, all);

  std::vector<std::string> names(lp.cost.size());
  names[0] = "V";
  names[1] = "L";
  names[2] = "R";
  for (std::size_t j = 0; j <= d_; ++j) {
    for (std::size_t k = 0; k < k_; ++k) {
      names[LambdaVar(j, k)] = "lambda_" + std::to_string(j) + "_" + std::to_string(k);
      if (j > 0) names[AlphaVar(j, k)] = "alpha_" + std::to_string(j) + "_" + std::to_string(k);
    }
    if (j > 0) names[BetaVar(j)] = "beta_" + std::to_string(j);
  }

  std::ostringstream out;
  out.precision(17);
  auto term = [&](double coef, int var) {
    out << (coef < 0 ? " - " : " + ") << std::abs(coef) << ' ' << names[var];
  };
  out << "Minimize\n obj: V\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& row = lp.rows[i];
    auto emit = [&](const char* op, double rhs, const char* suffix) {
      out << " c" << i << suffix << ':';
      for (std::size_t t = 0; t < row.index.size(); ++t) term(row.value[t], row.index[t]);
      out << ' ' << op << ' ' << rhs << '\n';
    };
    if (row.lower == row.upper) {
      emit("=", row.lower, "");
    } else {
      if (row.lower > -kInfinity) emit(">=", row.lower, row.upper < kInfinity ? "_lo" : "");
      if (row.upper < kInfinity) emit("<=", row.upper, row.lower > -kInfinity ? "_hi" : "");
    }
  }
  out << "Bounds\n";
  for (std::size_t v = 0; v < names.size(); ++v) {
    out << ' ';
    if (lp.lower[v] == -kInfinity) {
      out << "-inf";
    } else {
      out << lp.lower[v];
    }
    out << " <= " << names[v] << " <= ";
    if (lp.upper[v] == kInfinity) {
      out << "+inf";
    } else {
      out << lp.upper[v];
    }
    out << '\n';
  }
  out << "End\n";
  return out.str();
}

}  // namespace miss
