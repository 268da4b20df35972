#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/model.hpp"

namespace lcmpc {

/// p-periodic steady-state trajectory generated by a periodic input sequence.
struct LimitCycle {
  std::vector<int> input_indices;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> outputs;
  double closure_residual = 0.0;
  /// Set when the block system was ill-conditioned.
  std::string warning;

  int period() const { return static_cast<int>(input_indices.size()); }
  /// Reference state x_lc(k mod p) for any k >= 0.
  const Eigen::VectorXd& StateAt(long k) const;
  int InputAt(long k) const;
};

enum class CycleNorm { kOne, kTwo, kInf };

struct CycleCostSpec {
  CycleNorm norm = CycleNorm::kOne;
  /// Output reference; a single entry is treated as constant, otherwise its
  /// length must divide the period.
  std::vector<Eigen::VectorXd> reference;
};

/// A_0 A_1 ... A_{p-1}, the product in index order.
Eigen::MatrixXd Monodromy(const SwitchedAffineSystem& sys,
                          const std::vector<int>& input_indices);

/// A_{p-1} ... A_1 A_0, the map advancing x_lc(0) by one full period.
Eigen::MatrixXd PeriodMap(const SwitchedAffineSystem& sys,
                          const std::vector<int>& input_indices);

/// Solves the stacked cycle equations M_p X_p = b_p. Throws kNoUniqueCycle
/// when the period map has an eigenvalue at 1.
LimitCycle SolveCycle(const SwitchedAffineSystem& sys,
                      const std::vector<int>& input_indices);

/// Norm of the mean output error over one period.
double CycleCost(const LimitCycle& cycle, const CycleCostSpec& spec);

struct CycleSynthesis {
  LimitCycle cycle;
  double cost = 0.0;
  std::int64_t sequences_evaluated = 0;
  std::int64_t sequences_feasible = 0;
};

inline constexpr std::int64_t kCycleEnumerationBudget = 10'000'000;

/// Exhaustive search over all input sequences of length p. With a constant
/// reference only the lexicographically smallest rotation of each sequence is
/// evaluated, since rotations describe the same cycle. Ties are resolved by
/// the smallest sequence, so the result does not depend on `threads`.
CycleSynthesis SynthesizeOptimalCycle(const SwitchedAffineSystem& sys, int p,
                                      const CycleCostSpec& spec,
                                      bool constraints_on, int threads = 1);

/// True when `seq` is the smallest among its cyclic rotations.
bool IsCanonicalRotation(const std::vector<int>& seq);

}  // namespace lcmpc
