#include "lcmpc/sim.hpp"

#include "lcmpc/error.hpp"
#include "lcmpc/search.hpp"

namespace lcmpc {

namespace {

class BaselineProblem {
 public:
  BaselineProblem(const SwitchedAffineSystem& sys, const BaselineMpcConfig& cfg, int applied)
      : sys_(sys), cfg_(cfg), applied_(applied) {}

  int horizon() const { return cfg_.N; }

  double Stage(int, const Eigen::VectorXd& x, int u, int u_prev) const {
    const int prev = u_prev < 0 ? applied_ : u_prev;
    const double rate = (sys_.inputs()[u] - sys_.inputs()[prev]).squaredNorm();
    return cfg_.output_weight * OutputError(x, u) + cfg_.input_rate_weight * rate;
  }

  bool Admissible(int, const Eigen::VectorXd& x) const {
    return !cfg_.state_constraints || sys_.state_constraints().Contains(x, kFeasTol);
  }

  bool TerminalAdmissible(const Eigen::VectorXd&) const { return true; }

  double Terminal(const Eigen::VectorXd& x, int u_last) const {
    return cfg_.terminal_weight * OutputError(x, u_last);
  }

 private:
  double OutputError(const Eigen::VectorXd& x, int u) const {
    const Mode& m = sys_.mode(u);
    double s = 0.0;
    for (Eigen::Index r = 0; r < m.C.rows(); ++r) {
      const double e = m.C.row(r).dot(x) + m.d(r) - cfg_.reference(r);
      s += e * e;
    }
    return s;
  }

  const SwitchedAffineSystem& sys_;
  const BaselineMpcConfig& cfg_;
  int applied_;
};

void Record(ClosedLoopTrace& t, const SwitchedAffineSystem& sys, const Eigen::VectorXd& x,
            int u, double value, double err, std::int64_t expanded, std::int64_t pruned) {
  t.input_indices.push_back(u);
  t.inputs.push_back(sys.inputs()[u]);
  t.outputs.push_back(sys.Output(x, u));
  t.value.push_back(value);
  t.tracking_error.push_back(err);
  t.nodes_expanded.push_back(expanded);
  t.nodes_pruned.push_back(pruned);
  t.feasible.push_back(true);
}

}  // namespace

ClosedLoopTrace RunClosedLoop(const LimitCycleMpc& mpc, const Eigen::VectorXd& x0, long k0,
                              int steps) {
  const SwitchedAffineSystem& sys = mpc.system();
  const MpcConfig& cfg = mpc.config();
  if (steps < 0) throw Error(ErrorKind::kInvalidArgument, "negative step count");
  ClosedLoopTrace t;
  t.k0 = k0;
  t.states.push_back(x0);
  std::vector<int> shifted;
  double prev_value = 0.0;
  double prev_stage = 0.0;
  for (int s = 0; s < steps; ++s) {
    const long k = k0 + s;
    const Eigen::VectorXd& x = t.states.back();
    t.in_tube.push_back(cfg.terminal_tube.Contains(k, x));
    if (s > 0) t.shifted_feasible.push_back(mpc.SequenceValue(x, k, shifted).has_value());
    else t.shifted_feasible.push_back(true);

    const MpcSolution sol = mpc.Solve(x, k, s > 0 ? &shifted : nullptr);
    if (!sol.feasible) {
      t.feasible.push_back(false);
      t.halted = true;
      break;
    }
    if (s > 0) t.decrease_margin.push_back(sol.value - prev_value + prev_stage);
    const int u = sol.input_indices.front();
    Record(t, sys, x, u, sol.value, (x - cfg.cycle.StateAt(k)).norm(), sol.nodes_expanded,
           sol.nodes_pruned);
    t.plans.push_back(sol.input_indices);

    shifted.assign(sol.input_indices.begin() + 1, sol.input_indices.end());
    shifted.push_back(ReferenceAt(cfg.cycle, k, cfg.N).second);
    prev_value = sol.value;
    prev_stage = mpc.StageValue(x, k, u);
    t.states.push_back(sys.Next(x, u));
  }
  return t;
}

ClosedLoopTrace RunBaseline(const SwitchedAffineSystem& sys, const BaselineMpcConfig& cfg,
                            const Eigen::VectorXd& x0, int steps) {
  if (cfg.N < 1) throw Error(ErrorKind::kInvalidArgument, "horizon must be >= 1");
  if (cfg.output_weight < 0 || cfg.input_rate_weight < 0 || cfg.terminal_weight < 0) {
    throw Error(ErrorKind::kInvalidArgument, "baseline weights must be nonnegative");
  }
  if (cfg.reference.size() != sys.ny()) {
    throw Error(ErrorKind::kInvalidArgument, "baseline reference has wrong dimension");
  }
  ClosedLoopTrace t;
  t.states.push_back(x0);
  int applied = 0;
  std::vector<int> shifted;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd& x = t.states.back();
    const BaselineProblem problem(sys, cfg, applied);
    SearchOptions opts;
    opts.threads = cfg.threads;
    if (cfg.warm_start && s > 0) opts.warm_start = &shifted;
    const SearchResult r = BranchAndBound(sys, problem, x, opts);
    if (!r.feasible) {
      t.feasible.push_back(false);
      t.halted = true;
      break;
    }
    const int u = r.inputs.front();
    const Eigen::VectorXd e = sys.Output(x, u) - cfg.reference;
    Record(t, sys, x, u, r.value, e.norm(), r.nodes_expanded, r.nodes_pruned);
    t.plans.push_back(r.inputs);
    shifted.assign(r.inputs.begin() + 1, r.inputs.end());
    shifted.push_back(r.inputs.back());
    applied = u;
    t.states.push_back(sys.Next(x, u));
  }
  return t;
}

std::pair<int, int> DefaultSteadyStateWindow(int steps, int p, double burn_in) {
  if (p < 1 || steps < 1) throw Error(ErrorKind::kInvalidArgument, "bad window request");
  const int start = static_cast<int>(burn_in * steps);
  const int length = ((steps - start) / p) * p;
  return {start, length};
}

SteadyStateMetrics ComputeSteadyStateMetrics(const ClosedLoopTrace& trace,
                                             const Eigen::VectorXd& reference,
                                             int window_start, int window_length) {
  if (window_start < 0 || window_length < 1 ||
      window_start + window_length > trace.steps()) {
    throw Error(ErrorKind::kInvalidArgument, "window exceeds the trace");
  }
  SteadyStateMetrics m;
  m.window_start = window_start;
  m.window_length = window_length;
  m.mean_abs_error = Eigen::VectorXd::Zero(reference.size());
  m.mean_state = Eigen::VectorXd::Zero(trace.states.front().size());
  for (int t = window_start; t < window_start + window_length; ++t) {
    m.mean_abs_error += (trace.outputs[static_cast<std::size_t>(t)] - reference).cwiseAbs();
    m.mean_state += trace.states[static_cast<std::size_t>(t)];
  }
  m.mean_abs_error /= window_length;
  m.mean_state /= window_length;

  for (int q = 1; q <= window_length; ++q) {
    if (window_length % q != 0) continue;
    bool repeats = true;
    for (int t = window_start; t + q < window_start + window_length && repeats; ++t) {
      repeats = trace.input_indices[static_cast<std::size_t>(t)] ==
                trace.input_indices[static_cast<std::size_t>(t + q)];
    }
    if (repeats && q < window_length) {
      m.input_period = q;
      break;
    }
  }
  return m;
}

}  // namespace lcmpc
