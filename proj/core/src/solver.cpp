#include "miss/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>

#include "miss/heuristics.hpp"
#include "miss/loss.hpp"
#include "miss/relaxation.hpp"

namespace miss {

std::string FormatProgress(const ProgressEvent& e) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "elapsed=%.3f nodes=%ld v_min=%.9g v_max=%.9g gap=%.6g",
                e.elapsed_seconds, e.nodes, e.v_min, e.v_max, e.gap);
  return buf;
}

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapReached: return "gap_reached";
    case SolveStatus::kTimeout: return "timeout";
    case SolveStatus::kNodeLimit: return "node_limit";
  }
  return "unknown";
}

double OptimalityGap(double v_min, double v_max) {
  if (v_min < 0.0 || v_max < 0.0 || std::isnan(v_min) || std::isnan(v_max)) {
    throw Error("gap: bounds must be non-negative");
  }
  if (v_max == 0.0) return 0.0;
  if (std::isinf(v_max)) return 1.0;
  return std::clamp(1.0 - v_min / v_max, 0.0, 1.0);
}

std::pair<std::size_t, std::size_t> SelectBranchEntry(const RealMatrix& lambda, double tolerance) {
  double best = kInfinity;
  std::pair<std::size_t, std::size_t> entry{0, 0};
  bool found = false;
  for (Eigen::Index j = 0; j < lambda.rows(); ++j) {
    for (Eigen::Index k = 0; k < lambda.cols(); ++k) {
      const double v = lambda(j, k);
      if (std::abs(v - std::round(v)) <= tolerance) continue;
      const double distance = std::abs(v - std::floor(v) - 0.5);
      if (distance < best) {
        best = distance;
        entry = {static_cast<std::size_t>(j), static_cast<std::size_t>(k)};
        found = true;
      }
    }
  }
  if (!found) throw Error("branch: every coefficient is integral");
  return entry;
}

MissModel SolveResult::ToModel(const BinaryDataset& ds, const SolverConfig& cfg) const {
  ModelMeta meta;
  meta.c0 = cfg.c0;
  meta.lambda_min = cfg.constraints.lambda_min;
  meta.lambda_max = cfg.constraints.lambda_max;
  for (const auto& [feature, box] : cfg.constraints.feature_boxes) {
    meta.lambda_min = std::min(meta.lambda_min, box.lo);
    meta.lambda_max = std::max(meta.lambda_max, box.hi);
  }
  meta.bias_min = cfg.constraints.bias_min;
  meta.bias_max = cfg.constraints.bias_max;
  meta.r_max = std::min(cfg.constraints.r_max, static_cast<int>(ds.num_features()));
  meta.objective = v_max;
  meta.loss = loss;
  meta.optimality_gap = gap;
  meta.seed = cfg.seed;
  return MissModel(lambda, ds.feature_names(), ds.class_names(), meta);
}

namespace {

using Clock = std::chrono::steady_clock;
using Idx = Eigen::Index;

constexpr double kPruneSlack = 1e-9;
constexpr double kImprovement = 1e-9;
// Candidates worse than the incumbent by more than this fraction skip polishing.
constexpr double kPolishWindow = 0.1;
// Root cutting planes stop once the LP under-estimates its own point by less
// than this fraction of the true objective there.
constexpr double kRootCutTolerance = 1e-3;

struct Node {
  std::vector<IntBox> boxes;
  double bound = 0.0;
  int depth = 0;
  long id = 0;
  std::shared_ptr<const RelaxationBasis> basis;  // parent's final LP basis
};

// Heap comparator: lowest bound on top, then lowest id.
struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    return a.bound != b.bound ? a.bound > b.bound : a.id > b.id;
  }
};

class Lcpa {
 public:
  Lcpa(const BinaryDataset& ds, const SolverConfig& cfg)
      : ds_(ds),
        cfg_(cfg),
        space_(ds.num_features(), ds.num_classes(), cfg.constraints),
        relax_(space_, cfg.c0, InitialBounds(space_, cfg.c0), cfg.symmetry_breaking),
        start_(Clock::now()),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(std::max(cfg.time_limit_seconds, 0.0)))) {}

  SolveResult Run() {
    const std::size_t rows = ds_.num_features() + 1;
    const std::size_t cols = ds_.num_classes();
    AddCut(IntMatrix::Zero(static_cast<Idx>(rows), static_cast<Idx>(cols)));

    IntMatrix seed = space_.ZeroIsFeasible()
                         ? IntMatrix::Zero(static_cast<Idx>(rows), static_cast<Idx>(cols))
                         : FeasibleSeed(ds_, space_, cfg_.c0);
    incumbent_ = seed;
    v_max_ = EvaluateObjective(seed, &incumbent_loss_);
    AddCut(seed);
    Consider(seed, /*from_heuristic=*/false);

    Push(space_.boxes(), RootCuts(), 0);
    SolveStatus status = SolveStatus::kOptimal;
    Report();
    while (true) {
      while (!heap_.empty() && heap_.front().bound >= v_max_ - kPruneSlack) PopDiscard();
      const double lower = heap_.empty() ? v_max_ : std::min(heap_.front().bound, v_max_);
      if (lower > v_min_) {
        v_min_ = lower;
        Tighten();
        Report();
      }
      if (heap_.empty()) {
        v_min_ = v_max_;
        status = SolveStatus::kOptimal;
        break;
      }
      const double gap = OptimalityGap(v_min_, v_max_);
      if (gap <= cfg_.gap_tolerance) {
        status = gap == 0.0 ? SolveStatus::kOptimal : SolveStatus::kGapReached;
        break;
      }
      if (Clock::now() >= deadline_) {
        status = SolveStatus::kTimeout;
        break;
      }
      if (cfg_.node_limit >= 0 && stats_.nodes_processed >= cfg_.node_limit) {
        status = SolveStatus::kNodeLimit;
        break;
      }
      std::pop_heap(heap_.begin(), heap_.end(), NodeAfter{});
      Node node = std::move(heap_.back());
      heap_.pop_back();
      if (!Process(std::move(node))) {
        status = SolveStatus::kTimeout;
        break;
      }
    }

    SolveResult result;
    result.lambda = incumbent_;
    result.v_max = v_max_;
    result.v_min = std::min(v_min_, v_max_);
    result.gap = OptimalityGap(result.v_min, result.v_max);
    result.loss = incumbent_loss_;
    result.status = status;
    stats_.wall_time_seconds = Elapsed();
    result.stats = stats_;
    if (cfg_.progress) Report(/*force=*/true);
    return result;
  }

 private:
  double Elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  double EvaluateObjective(const IntMatrix& lambda, double* loss) const {
    const double l = LossValue(lambda.cast<double>(), ds_);
    if (loss != nullptr) *loss = l;
    return l + cfg_.c0 * ModelSize(lambda);
  }

  void AddCut(const IntMatrix& lambda) {
    if (relax_.AddCut(MakeCut(lambda.cast<double>(), ds_))) ++stats_.cuts_added;
  }

  void Report(bool force = false) {
    if (!cfg_.progress) return;
    ProgressEvent e;
    e.elapsed_seconds = Elapsed();
    e.nodes = stats_.nodes_processed;
    e.v_min = std::min(v_min_, v_max_);
    e.v_max = v_max_;
    e.gap = OptimalityGap(e.v_min, e.v_max);
    if (!force && e.v_min == last_reported_.first && e.v_max == last_reported_.second) return;
    last_reported_ = {e.v_min, e.v_max};
    cfg_.progress(e);
  }

  void Tighten() {
    if (!cfg_.use_bound_tightening) return;
    if (TightenBounds(&relax_.bounds(), cfg_.c0, v_max_, v_min_) == TightenOutcome::kEmpty) {
      // No lattice point beats the incumbent.
      heap_.clear();
    }
  }

  // Cutting planes at the root LP solution, fractional or not, until the LP
  // matches the loss at its own point. Returns the last root bound.
  double RootCuts() {
    if (cfg_.root_cut_rounds <= 0) return 0.0;
    const auto budget = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(std::max(cfg_.time_limit_seconds, 0.0) * cfg_.root_cut_time_fraction));
    const Clock::time_point stop = std::min(deadline_, start_ + budget);
    double bound = 0.0;
    for (int round = 0; round < cfg_.root_cut_rounds && Clock::now() < stop; ++round) {
      const LpSolution sol = relax_.Solve(nullptr, stop);
      ++stats_.lp_solves;
      if (sol.status != LpStatus::kOptimal) break;
      bound = std::max(bound, sol.objective);
      if (cfg_.use_rounding) Consider(SequentialRounding(sol.lambda, ds_, space_, cfg_.c0), true);
      if (bound >= v_max_ - kPruneSlack) break;
      const Cut cut = MakeCut(sol.lambda, ds_);
      const double truth = cut.value_at_anchor + cfg_.c0 * sol.size;
      if (truth - sol.objective <= kRootCutTolerance * truth) break;
      if (!relax_.AddCut(cut)) break;
      ++stats_.cuts_added;
    }
    return bound;
  }

  // Polishes a feasible candidate and adopts it if it beats the incumbent.
  void Consider(IntMatrix candidate, bool from_heuristic) {
    if (!space_.IsFeasible(candidate)) return;
    double loss = 0.0;
    double value = EvaluateObjective(candidate, &loss);
    if (cfg_.use_polishing && value <= v_max_ * (1.0 + kPolishWindow) &&
        polished_.insert(Key(candidate)).second) {
      IntMatrix polished = PolishOneOpt(candidate, ds_, space_, cfg_.c0);
      double polished_loss = 0.0;
      const double polished_value = EvaluateObjective(polished, &polished_loss);
      if (polished_value < value) {
        candidate = std::move(polished);
        value = polished_value;
        loss = polished_loss;
        from_heuristic = true;
      }
    }
    if (!(value < v_max_ - kImprovement)) return;
    incumbent_ = candidate;
    v_max_ = value;
    incumbent_loss_ = loss;
    if (from_heuristic) ++stats_.heuristic_improvements;
    AddCut(candidate);
    Tighten();
    Report();
  }

  void Push(std::vector<IntBox> boxes, double bound, int depth,
            std::shared_ptr<const RelaxationBasis> basis = nullptr) {
    heap_.push_back(Node{std::move(boxes), bound, depth, next_id_++, std::move(basis)});
    std::push_heap(heap_.begin(), heap_.end(), NodeAfter{});
  }

  void PopDiscard() {
    std::pop_heap(heap_.begin(), heap_.end(), NodeAfter{});
    heap_.pop_back();
  }

  void Split(const Node& node, std::size_t index, int left_hi, double bound) {
    const IntBox b = node.boxes[index];
    std::vector<IntBox> left = node.boxes;
    left[index] = IntBox{b.lo, left_hi};
    std::vector<IntBox> right = node.boxes;
    right[index] = IntBox{left_hi + 1, b.hi};
    Push(std::move(left), bound, node.depth + 1, node.basis);
    Push(std::move(right), bound, node.depth + 1, node.basis);
  }

  // Three-way split of a box containing zero into negative, zero and positive.
  void ZeroSplit(const Node& node, std::size_t index, double bound) {
    const IntBox b = node.boxes[index];
    for (IntBox part : {IntBox{b.lo, -1}, IntBox{0, 0}, IntBox{1, b.hi}}) {
      part.lo = std::max(part.lo, b.lo);
      part.hi = std::min(part.hi, b.hi);
      if (part.lo > part.hi) continue;
      std::vector<IntBox> boxes = node.boxes;
      boxes[index] = part;
      Push(std::move(boxes), bound, node.depth + 1, node.basis);
    }
  }

  // Branching when the LP lambda is integral but the node is unresolved.
  void BranchIntegral(const Node& node, const LpSolution& sol, double bound) {
    const std::size_t cols = ds_.num_classes();
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t j = 1; j <= ds_.num_features(); ++j) {
      for (std::size_t k = 0; k < cols; ++k) {
        const IntBox& b = node.boxes[j * cols + k];
        if (!b.ContainsZero() || b.Width() == 0) continue;
        const double a = sol.alpha(static_cast<Idx>(j - 1), static_cast<Idx>(k));
        const double score = std::min(a, 1.0 - a);
        if (score > best_score + 1e-9) {
          best_score = score;
          best = j * cols + k;
        }
      }
    }
    if (best > 0) {
      ZeroSplit(node, best, bound);
      return;
    }
    BranchWidest(node, bound);
  }

  void BranchWidest(const Node& node, double bound) {
    std::size_t best = node.boxes.size();
    int width = 0;
    for (std::size_t e = 0; e < node.boxes.size(); ++e) {
      if (node.boxes[e].Width() > width) {
        width = node.boxes[e].Width();
        best = e;
      }
    }
    if (best == node.boxes.size()) return;  // every entry fixed; the LP decided it
    const IntBox b = node.boxes[best];
    const int mid = b.lo + (b.hi - b.lo) / 2;
    Split(node, best, mid, bound);
  }

  // Adds the tangent at `point`; true when it cuts off the LP solution.
  bool CutAt(const IntMatrix& point, const LpSolution& sol) {
    const Cut cut = MakeCut(point.cast<double>(), ds_);
    if (!(cut.Evaluate(sol.lambda) > sol.loss + kImprovement)) return false;
    if (relax_.AddCut(cut)) ++stats_.cuts_added;
    return true;
  }

  static std::vector<int> Key(const IntMatrix& m) { return {m.data(), m.data() + m.size()}; }

  static bool Integral(const RealMatrix& lambda, double tolerance) {
    for (Idx j = 0; j < lambda.rows(); ++j) {
      for (Idx k = 0; k < lambda.cols(); ++k) {
        if (std::abs(lambda(j, k) - std::round(lambda(j, k))) > tolerance) return false;
      }
    }
    return true;
  }

  // Returns false when the time limit interrupted the node; it is re-queued.
  bool Process(Node node) {
    ++stats_.nodes_processed;
    for (int round = 0;; ++round) {
      LpSolution sol = relax_.Solve(&node.boxes, deadline_, node.basis.get());
      ++stats_.lp_solves;
      if (sol.status == LpStatus::kTimeLimit) {
        Push(std::move(node.boxes), node.bound, node.depth, node.basis);
        return false;
      }
      if (sol.basis) node.basis = sol.basis;
      if (sol.status == LpStatus::kInfeasible) return true;
      if (sol.status != LpStatus::kOptimal) {
        // No trustworthy bound: keep the parent's and split blind.
        ++stats_.lp_failures;
        BranchWidest(node, node.bound);
        return true;
      }
      const double bound = std::max(node.bound, sol.objective);
      if (bound >= v_max_ - kPruneSlack) return true;

      if (!Integral(sol.lambda, cfg_.integrality_tolerance)) {
        if (cfg_.use_rounding) {
          const IntMatrix rounded = SequentialRounding(sol.lambda, ds_, space_, cfg_.c0);
          Consider(rounded, /*from_heuristic=*/true);
          if (bound >= v_max_ - kPruneSlack) return true;
          // The rounded point is integer feasible, so its tangent is a legal cut.
          if (CutAt(rounded, sol) && round < cfg_.cut_budget) {
            node.bound = bound;
            continue;
          }
        }

        const auto [j, k] = SelectBranchEntry(sol.lambda, cfg_.integrality_tolerance);
        const double v = sol.lambda(static_cast<Idx>(j), static_cast<Idx>(k));
        Split(node, j * ds_.num_classes() + k, static_cast<int>(std::floor(v)), bound);
        return true;
      }

      IntMatrix point(sol.lambda.rows(), sol.lambda.cols());
      for (Idx j = 0; j < point.rows(); ++j) {
        for (Idx k = 0; k < point.cols(); ++k) point(j, k) = static_cast<int>(std::lround(sol.lambda(j, k)));
      }
      if (space_.IsFeasible(point, node.boxes)) {
        const double value = EvaluateObjective(point, nullptr);
        Consider(point, /*from_heuristic=*/false);
        // The LP attains the true objective at a point of this node.
        if (sol.objective >= value - kPruneSlack) return true;
      }
      if (CutAt(point, sol) && round < cfg_.cut_budget) {
        node.bound = bound;
        continue;
      }
      BranchIntegral(node, sol, bound);
      return true;
    }
  }

  const BinaryDataset& ds_;
  const SolverConfig& cfg_;
  SearchSpace space_;
  LpRelaxation relax_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  std::vector<Node> heap_;
  long next_id_ = 0;
  IntMatrix incumbent_;
  double v_max_ = kInfinity;
  double v_min_ = 0.0;
  double incumbent_loss_ = 0.0;
  SolveStats stats_;
  std::set<std::vector<int>> polished_;  // candidates already polished
  std::pair<double, double> last_reported_{-1.0, -1.0};
};

}  // namespace

SolveResult SolveMiss(const BinaryDataset& ds, const SolverConfig& cfg) {
  if (ds.num_samples() == 0) throw Error("solver: empty dataset");
  if (!(cfg.c0 > 0.0) || !std::isfinite(cfg.c0)) throw Error("solver: c0 must be positive");
  if (!(cfg.gap_tolerance >= 0.0 && cfg.gap_tolerance <= 1.0)) {
    throw Error("solver: gap tolerance outside [0, 1]");
  }
  if (cfg.cut_budget < 0) throw Error("solver: negative cut budget");
  Lcpa lcpa(ds, cfg);
  return lcpa.Run();
}

}  // namespace miss
