#include "lcmpc/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "lcmpc/error.hpp"
#include "parallel.hpp"

namespace lcmpc {
namespace {

constexpr double kEigOneTol = 1e-9;
constexpr double kCondWarn = 1e12;
constexpr double kCycleMembershipTol = 1e-9;

std::vector<Eigen::VectorXd> ExpandReference(const CycleCostSpec& spec, int p) {
  const auto len = static_cast<int>(spec.reference.size());
  if (len == 0 || p % len != 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "reference length must be 1 or divide the period");
  }
  std::vector<Eigen::VectorXd> ref;
  ref.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) ref.push_back(spec.reference[static_cast<std::size_t>(j % len)]);
  return ref;
}

bool ReferenceIsConstant(const CycleCostSpec& spec) {
  for (const auto& r : spec.reference) {
    if (r != spec.reference.front()) return false;
  }
  return true;
}

double MeanErrorNorm(const std::vector<Eigen::VectorXd>& outputs,
                     const std::vector<Eigen::VectorXd>& ref, CycleNorm norm) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(outputs.front().size());
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    if (ref[j].size() != mean.size()) {
      throw Error(ErrorKind::kInvalidArgument, "reference dimension mismatch");
    }
    mean += outputs[j] - ref[j];
  }
  mean /= static_cast<double>(outputs.size());
  switch (norm) {
    case CycleNorm::kOne: return mean.lpNorm<1>();
    case CycleNorm::kTwo: return mean.norm();
    case CycleNorm::kInf: return mean.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

struct Candidate {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<int> seq;
  std::optional<LimitCycle> cycle;
};

// Strict total order on (cost, sequence) so any partitioning of the search
// reduces to the same winner.
bool Better(double cost, const std::vector<int>& seq, const Candidate& best) {
  if (!best.cycle) return true;
  if (cost != best.cost) return cost < best.cost;
  return seq < best.seq;
}

void Decode(std::int64_t code, int base, std::vector<int>& seq) {
  for (int j = static_cast<int>(seq.size()) - 1; j >= 0; --j) {
    seq[static_cast<std::size_t>(j)] = static_cast<int>(code % base);
    code /= base;
  }
}

}  // namespace

const Eigen::VectorXd& LimitCycle::StateAt(long k) const {
  const long p = period();
  return states[static_cast<std::size_t>(((k % p) + p) % p)];
}

int LimitCycle::InputAt(long k) const {
  const long p = period();
  return input_indices[static_cast<std::size_t>(((k % p) + p) % p)];
}

Eigen::MatrixXd Monodromy(const SwitchedAffineSystem& sys,
                          const std::vector<int>& input_indices) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(sys.nx(), sys.nx());
  for (int i : input_indices) M = M * sys.mode(i).A;
  return M;
}

Eigen::MatrixXd PeriodMap(const SwitchedAffineSystem& sys,
                          const std::vector<int>& input_indices) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(sys.nx(), sys.nx());
  for (int i : input_indices) M = sys.mode(i).A * M;
  return M;
}

LimitCycle SolveCycle(const SwitchedAffineSystem& sys,
                      const std::vector<int>& input_indices) {
  const int p = static_cast<int>(input_indices.size());
  if (p < 1) throw Error(ErrorKind::kInvalidArgument, "period must be at least 1");
  const int n = sys.nx();

  const Eigen::MatrixXd period_map = PeriodMap(sys, input_indices);
  const Eigen::VectorXcd eig = period_map.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig(i) - std::complex<double>(1.0, 0.0)) < kEigOneTol) {
      throw Error(ErrorKind::kNoUniqueCycle,
                  "period map has an eigenvalue at 1; the cycle is not unique");
    }
  }

  // Block rows: A_j x_j - x_{j+1} = -b_j, with the last row wrapping to x_0.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p * n, p * n);
  Eigen::VectorXd rhs(p * n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < p; ++j) {
    const Mode& mode = sys.mode(input_indices[static_cast<std::size_t>(j)]);
    M.block(j * n, j * n, n, n) += mode.A;
    M.block(j * n, ((j + 1) % p) * n, n, n) -= I;
    rhs.segment(j * n, n) = -mode.b;
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  const Eigen::VectorXd X = lu.solve(rhs);

  LimitCycle cycle;
  cycle.input_indices = input_indices;
  double scale = 0.0;
  for (int j = 0; j < p; ++j) {
    cycle.states.push_back(X.segment(j * n, n));
    scale = std::max(scale, cycle.states.back().norm());
  }
  for (int j = 0; j < p; ++j) {
    const int u = input_indices[static_cast<std::size_t>(j)];
    cycle.outputs.push_back(sys.Output(cycle.states[static_cast<std::size_t>(j)], u));
  }
  // Closure: propagate x_lc(0) through one full period.
  Eigen::VectorXd x = cycle.states.front();
  for (int u : input_indices) x = sys.Next(x, u);
  cycle.closure_residual = (x - cycle.states.front()).norm();

  const double rcond = lu.rcond();
  if (rcond > 0.0 && 1.0 / rcond > kCondWarn) {
    cycle.warning = "ill-conditioned cycle system (condition estimate " +
                    std::to_string(1.0 / rcond) + ")";
  }
  if (cycle.closure_residual > 1e-9 * (1.0 + scale)) {
    cycle.warning += (cycle.warning.empty() ? "" : "; ");
    cycle.warning += "closure residual " + std::to_string(cycle.closure_residual);
  }
  return cycle;
}

double CycleCost(const LimitCycle& cycle, const CycleCostSpec& spec) {
  return MeanErrorNorm(cycle.outputs, ExpandReference(spec, cycle.period()), spec.norm);
}

bool IsCanonicalRotation(const std::vector<int>& seq) {
  const std::size_t p = seq.size();
  for (std::size_t r = 1; r < p; ++r) {
    for (std::size_t j = 0; j < p; ++j) {
      const int a = seq[(j + r) % p];
      const int b = seq[j];
      if (a < b) return false;
      if (a > b) break;
    }
  }
  return true;
}

CycleSynthesis SynthesizeOptimalCycle(const SwitchedAffineSystem& sys, int p,
                                      const CycleCostSpec& spec,
                                      bool constraints_on, int threads) {
  if (p < 1) throw Error(ErrorKind::kInvalidArgument, "period must be at least 1");
  const int ns = sys.num_inputs();
  std::int64_t total = 1;
  for (int j = 0; j < p; ++j) {
    total *= ns;
    if (total > kCycleEnumerationBudget) {
      throw Error(ErrorKind::kBudgetExceeded,
                  "N_s^p exceeds the cycle enumeration budget");
    }
  }
  const std::vector<Eigen::VectorXd> ref = ExpandReference(spec, p);
  const bool dedup_rotations = ReferenceIsConstant(spec);
  threads = std::max(1, threads);

  struct Partial {
    Candidate best;
    std::int64_t evaluated = 0;
    std::int64_t feasible = 0;
  };
  std::vector<Partial> partials(static_cast<std::size_t>(threads));

  auto worker = [&](int t) {
    Partial& out = partials[static_cast<std::size_t>(t)];
    std::vector<int> seq(static_cast<std::size_t>(p));
    const std::int64_t begin = total * t / threads;
    const std::int64_t end = total * (t + 1) / threads;
    for (std::int64_t code = begin; code < end; ++code) {
      Decode(code, ns, seq);
      if (dedup_rotations && !IsCanonicalRotation(seq)) continue;
      ++out.evaluated;
      LimitCycle cycle;
      try {
        cycle = SolveCycle(sys, seq);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kNoUniqueCycle) continue;
        throw;
      }
      if (constraints_on) {
        const bool inside = std::all_of(
            cycle.states.begin(), cycle.states.end(), [&](const Eigen::VectorXd& x) {
              return sys.state_constraints().Contains(x, kCycleMembershipTol);
            });
        if (!inside) continue;
      }
      ++out.feasible;
      const double cost = MeanErrorNorm(cycle.outputs, ref, spec.norm);
      if (Better(cost, seq, out.best)) {
        out.best.cost = cost;
        out.best.seq = seq;
        out.best.cycle = std::move(cycle);
      }
    }
  };

  detail::RunWorkers(threads, worker);

  CycleSynthesis result;
  Candidate best;
  for (Partial& part : partials) {
    result.sequences_evaluated += part.evaluated;
    result.sequences_feasible += part.feasible;
    if (part.best.cycle && Better(part.best.cost, part.best.seq, best)) {
      best = std::move(part.best);
    }
  }
  if (!best.cycle) {
    throw Error(ErrorKind::kNoFeasibleCycle,
                "no input sequence of period " + std::to_string(p) +
                    " yields an admissible limit cycle");
  }
  result.cycle = std::move(*best.cycle);
  result.cost = best.cost;
  return result;
}

}  // namespace lcmpc
