#include "lcmpc/mpc.hpp"

#include "lcmpc/error.hpp"
#include "lcmpc/search.hpp"

namespace lcmpc {

namespace {

double Quadratic(const Eigen::MatrixXd& W, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& ref) {
  const Eigen::Index n = x.size();
  double s = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    const double za = x(a) - ref(a);
    double row = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) row += W(a, b) * (x(b) - ref(b));
    s += za * row;
  }
  return s;
}

bool InBox(const Eigen::MatrixXd& H, const Eigen::VectorXd& h, const Eigen::VectorXd& x,
           double tol) {
  const Eigen::Index n = x.size();
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) s += H(r, c) * x(c);
    if (s > h(r) + tol) return false;
  }
  return true;
}

class LimitCycleProblem {
 public:
  LimitCycleProblem(const SwitchedAffineSystem& sys, const MpcConfig& cfg, long k)
      : cfg_(cfg), X_(sys.state_constraints()) {
    const int N = cfg.N;
    const int ns = sys.num_inputs();
    refs_.reserve(static_cast<std::size_t>(N + 1));
    input_cost_.resize(N, ns);
    for (int i = 0; i <= N; ++i) {
      auto [xr, ur] = ReferenceAt(cfg.cycle, k, i);
      refs_.push_back(std::move(xr));
      if (i == N) break;
      const Eigen::VectorXd& uref = sys.inputs()[ur];
      for (int u = 0; u < ns; ++u) {
        const Eigen::VectorXd v = sys.inputs()[u] - uref;
        input_cost_(i, u) = v.dot(cfg.stage.R * v);
      }
    }
    P_ = &cfg.terminal.At(k + N);
    terminal_ = TerminalSetAt(cfg.terminal_tube, k, N);
  }

  int horizon() const { return cfg_.N; }

  double Stage(int i, const Eigen::VectorXd& x, int u, int) const {
    return Quadratic(cfg_.stage.Q, x, refs_[static_cast<std::size_t>(i)]) +
           input_cost_(i, u);
  }

  bool Admissible(int, const Eigen::VectorXd& x) const {
    return !cfg_.state_constraints || InBox(X_.H(), X_.h(), x, kFeasTol);
  }

  bool TerminalAdmissible(const Eigen::VectorXd& x) const {
    if (terminal_.polytope != nullptr) {
      return InBox(terminal_.polytope->H(), terminal_.polytope->h(), x, kFeasTol);
    }
    return terminal_.Contains(x, kFeasTol);
  }

  double Terminal(const Eigen::VectorXd& x, int) const {
    return Quadratic(*P_, x, refs_.back());
  }

 private:
  const MpcConfig& cfg_;
  const Polytope& X_;
  std::vector<Eigen::VectorXd> refs_;
  Eigen::MatrixXd input_cost_;
  const Eigen::MatrixXd* P_ = nullptr;
  TerminalSetRef terminal_;
};

}  // namespace

std::pair<Eigen::VectorXd, int> ReferenceAt(const LimitCycle& cycle, long k, int i) {
  return {cycle.StateAt(k + i), cycle.InputAt(k + i)};
}

int TerminalPhase(int p, long k, int N) {
  if (p <= 0) throw Error(ErrorKind::kInvalidArgument, "period must be positive");
  const long r = (k + N) % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

bool TerminalSetRef::Contains(const Eigen::VectorXd& x, double tol) const {
  if (polytope != nullptr) return polytope->Contains(x, tol);
  if (ellipsoid != nullptr) return ellipsoid->Level(x) <= 1.0 + tol;
  return true;
}

TerminalSetRef TerminalSetAt(const StateTube& tube, long k, int N) {
  const int phase = TerminalPhase(tube.period(), k, N);
  TerminalSetRef ref;
  if (tube.kind == TubeKind::kPolytopic) {
    ref.polytope = &tube.polytopes[static_cast<std::size_t>(phase)];
  } else {
    ref.ellipsoid = &tube.ellipsoids[static_cast<std::size_t>(phase)];
  }
  return ref;
}

LimitCycleMpc::LimitCycleMpc(const SwitchedAffineSystem& sys, MpcConfig config)
    : sys_(sys), config_(std::move(config)) {
  const int p = config_.cycle.period();
  if (config_.N < 1) throw Error(ErrorKind::kInvalidArgument, "horizon must be >= 1");
  if (p < 1) throw Error(ErrorKind::kInvalidArgument, "empty limit cycle");
  if (config_.terminal.period() != p) {
    throw Error(ErrorKind::kInvalidArgument, "terminal cost period differs from cycle period");
  }
  if (config_.terminal_tube.period() != p) {
    throw Error(ErrorKind::kInvalidArgument, "terminal tube period differs from cycle period");
  }
  const int n = sys.nx();
  if (config_.stage.Q.rows() != n || config_.stage.R.rows() != sys.nu()) {
    throw Error(ErrorKind::kInvalidArgument, "stage weights have wrong dimension");
  }
  for (const auto& P : config_.terminal.P) {
    if (P.rows() != n || P.cols() != n) {
      throw Error(ErrorKind::kInvalidArgument, "terminal weight has wrong dimension");
    }
  }
  if (config_.threads < 1) throw Error(ErrorKind::kInvalidArgument, "threads must be >= 1");
}

MpcSolution LimitCycleMpc::Solve(const Eigen::VectorXd& x, long k,
                                 const std::vector<int>* warm_start) const {
  if (x.size() != sys_.nx()) throw Error(ErrorKind::kInvalidArgument, "state dimension");
  const LimitCycleProblem problem(sys_, config_, k);
  SearchOptions opts;
  opts.threads = config_.threads;
  if (config_.warm_start) opts.warm_start = warm_start;
  const SearchResult r = BranchAndBound(sys_, problem, x, opts);

  MpcSolution sol;
  sol.nodes_expanded = r.nodes_expanded;
  sol.nodes_pruned = r.nodes_pruned;
  sol.feasible = r.feasible;
  if (!r.feasible) return sol;
  sol.input_indices = r.inputs;
  sol.value = r.value;
  sol.predicted_states.reserve(static_cast<std::size_t>(config_.N + 1));
  sol.predicted_states.push_back(x);
  for (int u : r.inputs) sol.predicted_states.push_back(sys_.Next(sol.predicted_states.back(), u));
  return sol;
}

Eigen::VectorXd LimitCycleMpc::Control(const Eigen::VectorXd& x, long k) const {
  const MpcSolution sol = Solve(x, k);
  if (!sol.feasible) throw Error(ErrorKind::kInfeasible, "no admissible input sequence");
  return sys_.inputs()[sol.input_indices.front()];
}

std::optional<double> LimitCycleMpc::SequenceValue(const Eigen::VectorXd& x, long k,
                                                   const std::vector<int>& seq) const {
  const LimitCycleProblem problem(sys_, config_, k);
  const auto v = SequenceCost(sys_, problem, x, seq);
  if (!v) return std::nullopt;
  return static_cast<double>(*v);
}

double LimitCycleMpc::StageValue(const Eigen::VectorXd& x, long k, int u) const {
  const Eigen::VectorXd z = x - config_.cycle.StateAt(k);
  const Eigen::VectorXd v = sys_.inputs()[u] - sys_.inputs()[config_.cycle.InputAt(k)];
  return config_.stage(z, v);
}

}  // namespace lcmpc
