#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/model.hpp"

namespace lcmpc {

/// Outcome of an exhaustive search over input sequences.
struct SearchResult {
  bool feasible = false;
  std::vector<int> inputs;
  double value = std::numeric_limits<double>::infinity();
  std::int64_t nodes_expanded = 0;
  std::int64_t nodes_pruned = 0;
};

struct SearchOptions {
  int threads = 1;
  /// Optional sequence whose cost seeds the incumbent. Never changes the
  /// returned minimizer, only how much of the tree is visited.
  const std::vector<int>* warm_start = nullptr;
};

namespace detail {

template <typename Problem>
class SearchWorker {
 public:
  using Acc = long double;

  SearchWorker(const SwitchedAffineSystem& sys, const Problem& problem,
               std::atomic<double>& shared_bound)
      : sys_(sys),
        problem_(problem),
        shared_bound_(shared_bound),
        horizon_(problem.horizon()),
        states_(static_cast<std::size_t>(horizon_ + 1), Eigen::VectorXd(sys.nx())),
        seq_(static_cast<std::size_t>(horizon_), 0) {}

  void Seed(const std::vector<int>& seq, Acc value) {
    best_seq_ = seq;
    best_value_ = value;
    have_best_ = true;
  }

  void SearchFrom(const Eigen::VectorXd& x0, int first_input) {
    states_[0] = x0;
    Expand(0, 0.0L, first_input, first_input + 1);
  }

  void SearchAll(const Eigen::VectorXd& x0) {
    states_[0] = x0;
    Expand(0, 0.0L, 0, sys_.num_inputs());
  }

  bool have_best() const { return have_best_; }
  Acc best_value() const { return best_value_; }
  const std::vector<int>& best_seq() const { return best_seq_; }
  std::int64_t expanded() const { return expanded_; }
  std::int64_t pruned() const { return pruned_; }

 private:
  bool Dominated(Acc partial) const {
    if (have_best_ && partial > best_value_) return true;
    return partial > static_cast<Acc>(shared_bound_.load(std::memory_order_relaxed));
  }

  void Publish(Acc value) {
    // Round up so the shared bound never undercuts an exact value.
    const double up = std::nextafter(static_cast<double>(value),
                                     std::numeric_limits<double>::infinity());
    double cur = shared_bound_.load(std::memory_order_relaxed);
    while (up < cur && !shared_bound_.compare_exchange_weak(cur, up)) {
    }
  }

  void Expand(int depth, Acc partial, int u_begin, int u_end) {
    const Eigen::VectorXd& x = states_[static_cast<std::size_t>(depth)];
    Eigen::VectorXd& next = states_[static_cast<std::size_t>(depth + 1)];
    const int u_prev = depth == 0 ? -1 : seq_[static_cast<std::size_t>(depth - 1)];
    for (int u = u_begin; u < u_end; ++u) {
      ++expanded_;
      const Acc cost = partial + static_cast<Acc>(problem_.Stage(depth, x, u, u_prev));
      if (Dominated(cost)) {
        ++pruned_;
        continue;
      }
      const Mode& mode = sys_.mode(u);
      next.noalias() = mode.A * x;
      next += mode.b;
      seq_[static_cast<std::size_t>(depth)] = u;
      if (depth + 1 < horizon_) {
        if (!problem_.Admissible(depth + 1, next)) {
          ++pruned_;
          continue;
        }
        Expand(depth + 1, cost, 0, sys_.num_inputs());
      } else {
        if (!problem_.TerminalAdmissible(next)) {
          ++pruned_;
          continue;
        }
        const Acc total = cost + static_cast<Acc>(problem_.Terminal(next, u));
        if (!have_best_ || total < best_value_ ||
            (total == best_value_ && seq_ < best_seq_)) {
          best_value_ = total;
          best_seq_ = seq_;
          have_best_ = true;
          Publish(total);
        }
      }
    }
  }

  const SwitchedAffineSystem& sys_;
  const Problem& problem_;
  std::atomic<double>& shared_bound_;
  int horizon_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<int> seq_;
  std::vector<int> best_seq_;
  Acc best_value_ = 0.0L;
  bool have_best_ = false;
  std::int64_t expanded_ = 0;
  std::int64_t pruned_ = 0;
};

}  // namespace detail

/// Cost of one input sequence, or nullopt when it violates a constraint.
template <typename Problem>
std::optional<long double> SequenceCost(const SwitchedAffineSystem& sys,
                                        const Problem& problem,
                                        const Eigen::VectorXd& x0,
                                        const std::vector<int>& seq) {
  const int N = problem.horizon();
  if (static_cast<int>(seq.size()) != N) return std::nullopt;
  Eigen::VectorXd x = x0;
  long double cost = 0.0L;
  for (int i = 0; i < N; ++i) {
    const int u = seq[static_cast<std::size_t>(i)];
    if (u < 0 || u >= sys.num_inputs()) return std::nullopt;
    cost += problem.Stage(i, x, u, i == 0 ? -1 : seq[static_cast<std::size_t>(i - 1)]);
    x = sys.Next(x, u);
    if (i + 1 < N && !problem.Admissible(i + 1, x)) return std::nullopt;
  }
  if (!problem.TerminalAdmissible(x)) return std::nullopt;
  return cost + problem.Terminal(x, seq.back());
}

/// Depth-first branch and bound over all N_s^N input sequences.
///
/// Children are visited in ascending input index and a subtree is cut once
/// its accumulated stage cost exceeds the incumbent, which is exact because
/// every cost term is nonnegative. Among equal-cost sequences the
/// lexicographically smallest wins. With several threads the first input is
/// partitioned across workers that share an upper bound; the final
/// reduction applies the same order, so the answer matches the
/// single-threaded one.
///
/// Problem must provide horizon(), Stage(i, x, u, u_prev) (u_prev = -1 at
/// the first step), Admissible(i, x) for 1 <= i < N, TerminalAdmissible(x)
/// and Terminal(x, u_last). All costs must be nonnegative.
template <typename Problem>
SearchResult BranchAndBound(const SwitchedAffineSystem& sys, const Problem& problem,
                            const Eigen::VectorXd& x0, const SearchOptions& options = {}) {
  using Worker = detail::SearchWorker<Problem>;
  const int ns = sys.num_inputs();
  const int workers = std::clamp(options.threads, 1, ns);
  std::atomic<double> shared_bound(std::numeric_limits<double>::infinity());

  std::optional<long double> seed_value;
  if (options.warm_start != nullptr) {
    seed_value = SequenceCost(sys, problem, x0, *options.warm_start);
  }

  std::vector<Worker> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back(sys, problem, shared_bound);
    if (seed_value) pool.back().Seed(*options.warm_start, *seed_value);
  }

  if (workers == 1) {
    pool.front().SearchAll(x0);
  } else {
    std::vector<std::thread> threads;
    std::exception_ptr error;
    std::mutex mu;
    for (int t = 0; t < workers; ++t) {
      threads.emplace_back([&, t] {
        try {
          for (int u = t; u < ns; u += workers) {
            pool[static_cast<std::size_t>(t)].SearchFrom(x0, u);
          }
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
  }

  SearchResult result;
  const Worker* best = nullptr;
  for (const Worker& w : pool) {
    result.nodes_expanded += w.expanded();
    result.nodes_pruned += w.pruned();
    if (!w.have_best()) continue;
    if (best == nullptr || w.best_value() < best->best_value() ||
        (w.best_value() == best->best_value() && w.best_seq() < best->best_seq())) {
      best = &w;
    }
  }
  if (best != nullptr) {
    result.feasible = true;
    result.inputs = best->best_seq();
    result.value = static_cast<double>(best->best_value());
  }
  return result;
}

}  // namespace lcmpc
