#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "lcmpc/config.hpp"
#include "lcmpc/error.hpp"
#include "lcmpc/pipeline.hpp"
#include "lcmpc/serialize.hpp"

namespace fs = std::filesystem;
using namespace lcmpc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerify = 4;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string tube_kind;
  std::string feasible_mode = "exact";
  bool baseline = false;
};

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema:
      return kExitSchema;
    case ErrorKind::kInfeasible:
    case ErrorKind::kNoUniqueCycle:
    case ErrorKind::kNoFeasibleCycle:
    case ErrorKind::kNotStabilizing:
    case ErrorKind::kNoTube:
    case ErrorKind::kNotConverged:
      return kExitInfeasible;
    default:
      return kExitInternal;
  }
}

std::string OutDir(const Options& o, const ExperimentConfig& cfg) {
  const std::string dir = o.out.empty() ? cfg.output_dir : o.out;
  fs::create_directories(dir);
  return dir;
}

void Emit(const std::string& dir, const std::string& name, const std::string& body) {
  WriteFile((fs::path(dir) / name).string(), body);
}

void EmitJson(const std::string& dir, const std::string& name, const Json& j) {
  Emit(dir, name, CanonicalDump(j) + "\n");
}

TubeKind ParseKind(const std::string& s, TubeKind fallback) {
  if (s.empty()) return fallback;
  return s == "ellipsoidal" ? TubeKind::kEllipsoidal : TubeKind::kPolytopic;
}

const char* KindName(TubeKind k) { return k == TubeKind::kPolytopic ? "polytopic" : "ellipsoidal"; }

int RunDiscretize(const Options& o) {
  const ExperimentConfig cfg = LoadConfig(o.config);
  const std::string dir = OutDir(o, cfg);
  Json j = ToJson(cfg.system);
  j["Ts"] = cfg.Ts;
  EmitJson(dir, "system.json", j);
  return kExitOk;
}

int RunCycle(const Options& o) {
  Pipeline pipe(LoadConfig(o.config), o.threads);
  const std::string dir = OutDir(o, pipe.config());
  const LimitCycle& c = pipe.Cycle();
  Json j = ToJson(c, pipe.system());
  j["cost"] = CycleCost(c, pipe.config().cycle.cost);
  if (const auto& syn = pipe.Synthesis()) {
    j["sequences_evaluated"] = syn->sequences_evaluated;
    j["sequences_feasible"] = syn->sequences_feasible;
  }
  EmitJson(dir, "system.json", ToJson(pipe.system()));
  EmitJson(dir, "cycle.json", j);
  Emit(dir, "cycle.csv", CycleCsv(c, pipe.system()));
  std::cout << "cycle period " << c.period() << ", cost " << j["cost"].get<double>() << "\n";
  return kExitOk;
}

int RunTerminalCost(const Options& o) {
  Pipeline pipe(LoadConfig(o.config), o.threads);
  const std::string dir = OutDir(o, pipe.config());
  const PeriodicTerminalCost& P = pipe.TerminalCost();
  const TerminalCostReport rep =
      VerifyTerminalCost(pipe.system(), pipe.Cycle(), pipe.config().mpc.Q, P.P);
  EmitJson(dir, "system.json", ToJson(pipe.system()));
  EmitJson(dir, "cycle.json", ToJson(pipe.Cycle(), pipe.system()));
  EmitJson(dir, "terminal_cost.json", Json{{"terminal_cost", ToJson(P)},
                                           {"Q", ToJson(pipe.config().mpc.Q)},
                                           {"report", ToJson(rep)}});
  std::cout << "terminal cost worst residual " << rep.WorstResidual()
            << (rep.pass ? " pass" : " FAIL") << "\n";
  return rep.pass ? kExitOk : kExitVerify;
}

int RunTube(const Options& o) {
  Pipeline pipe(LoadConfig(o.config), o.threads);
  const std::string dir = OutDir(o, pipe.config());
  const TubeKind kind = ParseKind(o.tube_kind, pipe.config().mpc.tube);
  const ErrorTube& tube = pipe.Tube(kind);
  const TubeReport rep = VerifyTube(pipe.system(), pipe.Cycle(), tube);
  const std::string name = KindName(kind);
  EmitJson(dir, "system.json", ToJson(pipe.system()));
  EmitJson(dir, "cycle.json", ToJson(pipe.Cycle(), pipe.system()));
  EmitJson(dir, "tube_" + name + ".json", Json{{"tube", ToJson(tube)}, {"report", ToJson(rep)}});
  if (kind == TubeKind::kPolytopic && pipe.system().nx() == 2) {
    Emit(dir, "tube_" + name + "_vertices.csv",
         VertexCsv({LiftToState(tube, pipe.Cycle()).polytopes}));
  }
  std::cout << name << " tube: " << tube.period() << " sets, invariance margin "
            << rep.invariance_margin << (rep.pass ? " pass" : " FAIL") << "\n";
  return rep.pass ? kExitOk : kExitVerify;
}

int RunFeasible(const Options& o) {
  Pipeline pipe(LoadConfig(o.config), o.threads);
  const std::string dir = OutDir(o, pipe.config());
  const bool exact = o.feasible_mode == "exact";
  const FeasibleSetResult r = pipe.Feasible(exact ? FeasibleKind::kExactUnion : FeasibleKind::kOuterHull);
  const std::string name = exact ? "exact" : "hull";
  Json j = ToJson(r);
  j["x0_contained"] = r.Contains(pipe.config().simulation.x0);
  if (exact && pipe.system().nx() == 2 && pipe.config().feasible.hull) {
    const FeasibleSetResult hull = pipe.Feasible(FeasibleKind::kOuterHull);
    j["nonconvexity_gap"] = NonConvexityGap(r, hull, 20000, o.seed);
  }
  EmitJson(dir, "feasible_" + name + ".json", j);
  if (pipe.system().nx() == 2) Emit(dir, "feasible_" + name + "_vertices.csv", VertexCsv({r.Final()}));
  std::cout << name << " feasible set: " << r.Final().size() << " pieces, x0 "
            << (j["x0_contained"].get<bool>() ? "inside" : "outside") << "\n";
  return kExitOk;
}

Json TraceSummary(const ClosedLoopTrace& t, const ExperimentConfig& cfg, int p,
                  const Eigen::VectorXd& reference) {
  Json j;
  bool all_feasible = !t.halted;
  for (bool f : t.feasible) all_feasible = all_feasible && f;
  j["all_feasible"] = all_feasible;
  j["steps"] = t.steps();
  bool constraints = true;
  for (const auto& x : t.states) constraints = constraints && cfg.system.state_constraints().Contains(x);
  j["constraints_satisfied"] = constraints;
  if (t.steps() > 0) {
    const auto [start, len] = DefaultSteadyStateWindow(t.steps(), p, cfg.simulation.burn_in);
    if (len > 0) j["steady_state"] = ToJson(ComputeSteadyStateMetrics(t, reference, start, len));
  }
  return j;
}

int RunSimulate(const Options& o) {
  Pipeline pipe(LoadConfig(o.config), o.threads);
  const ExperimentConfig& cfg = pipe.config();
  const std::string dir = OutDir(o, cfg);
  const int p = pipe.Cycle().period();
  const Eigen::VectorXd& yref = cfg.cycle.cost.reference.front();

  const ClosedLoopTrace t = pipe.Simulate();
  Json m = TraceSummary(t, cfg, p, yref);
  bool shifted = true;
  for (bool s : t.shifted_feasible) shifted = shifted && s;
  double worst_decrease = -std::numeric_limits<double>::infinity();
  for (double d : t.decrease_margin) worst_decrease = std::max(worst_decrease, d);
  m["shifted_sequence_feasible"] = shifted;
  m["worst_decrease_margin"] = t.decrease_margin.empty() ? Json(nullptr) : Json(worst_decrease);
  Emit(dir, "trace.csv", TraceCsv(t));
  EmitJson(dir, "metrics.json", m);
  std::cout << "closed loop: " << t.steps() << " steps" << (t.halted ? " (halted)" : "") << "\n";

  if (o.baseline) {
    const ClosedLoopTrace b = pipe.SimulateBaseline();
    Emit(dir, "baseline_trace.csv", TraceCsv(b));
    EmitJson(dir, "baseline_metrics.json", TraceSummary(b, cfg, p, cfg.simulation.baseline->reference));
    std::cout << "baseline: " << b.steps() << " steps\n";
  }
  return t.halted ? kExitInfeasible : kExitOk;
}

bool Exists(const std::string& dir, const std::string& name) {
  return fs::exists(fs::path(dir) / name);
}

Json Load(const std::string& dir, const std::string& name) {
  return ReadJsonFile((fs::path(dir) / name).string());
}

int RunVerify(const Options& o) {
  std::string dir = o.out;
  if (dir.empty()) {
    if (o.config.empty()) throw Error(ErrorKind::kSchema, "verify needs --out or --config");
    dir = LoadConfig(o.config).output_dir;
  }
  if (!Exists(dir, "system.json") || !Exists(dir, "cycle.json")) {
    throw Error(ErrorKind::kSchema, dir + ": system.json and cycle.json are required");
  }
  const Json sj = Load(dir, "system.json");
  const Json cj = Load(dir, "cycle.json");
  const SwitchedAffineSystem sys = SystemFromJson(JsonPath(sj));
  const LimitCycle cycle = CycleFromJson(JsonPath(cj));
  bool ok = true;

  double closure = 0.0;
  for (int j = 0; j < cycle.period(); ++j) {
    const Eigen::VectorXd next = sys.Next(cycle.StateAt(j), cycle.InputAt(j));
    closure = std::max(closure, (next - cycle.StateAt(j + 1)).cwiseAbs().maxCoeff());
  }
  const bool cycle_ok = closure <= 1e-8;
  std::printf("%s cycle closure %.3g\n", cycle_ok ? "PASS" : "FAIL", closure);
  ok = ok && cycle_ok;

  if (Exists(dir, "terminal_cost.json")) {
    const Json tj = Load(dir, "terminal_cost.json");
    const JsonPath root(tj);
    const PeriodicTerminalCost P = TerminalCostFromJson(root["terminal_cost"]);
    const TerminalCostReport rep = VerifyTerminalCost(sys, cycle, root["Q"].AsMatrix(), P.P);
    std::printf("%s terminal cost worst residual %.3g\n", rep.pass ? "PASS" : "FAIL", rep.WorstResidual());
    ok = ok && rep.pass;
  }
  for (const char* kind : {"polytopic", "ellipsoidal"}) {
    const std::string name = std::string("tube_") + kind + ".json";
    if (!Exists(dir, name)) continue;
    const Json tj = Load(dir, name);
    const ErrorTube tube = ErrorTubeFromJson(JsonPath(tj)["tube"]);
    const TubeReport rep = VerifyTube(sys, cycle, tube);
    std::printf("%s %s tube invariance %.3g containment %.3g interior %.3g\n",
                rep.pass ? "PASS" : "FAIL", kind, rep.invariance_margin,
                rep.containment_margin, rep.interior_margin);
    ok = ok && rep.pass;
  }
  if (Exists(dir, "metrics.json")) {
    const Json mj = Load(dir, "metrics.json");
    const bool sim_ok = mj.value("all_feasible", false) && mj.value("constraints_satisfied", false) &&
                        mj.value("shifted_sequence_feasible", false);
    std::printf("%s closed-loop invariants\n", sim_ok ? "PASS" : "FAIL");
    ok = ok && sim_ok;
  }
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit-cycle FCS-MPC design and simulation"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Experiment configuration (JSON)");
  app.add_option("--out", o.out, "Output directory (overrides the config)");
  app.add_option("--seed", o.seed, "Seed for randomized diagnostics");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* discretize = app.add_subcommand("discretize", "Emit the discrete-time system");
  auto* cycle = app.add_subcommand("cycle", "Solve or synthesize the limit cycle");
  auto* terminal = app.add_subcommand("terminal-cost", "Solve and verify the periodic terminal cost");
  auto* tube = app.add_subcommand("tube", "Compute and verify a periodic invariant tube");
  tube->add_option("--kind", o.tube_kind, "Tube representation")
      ->check(CLI::IsMember({"ellipsoidal", "polytopic"}));
  auto* feasible = app.add_subcommand("feasible", "Compute the feasible state set");
  feasible->add_option("--mode", o.feasible_mode, "exact union or convex outer hull")
      ->check(CLI::IsMember({"exact", "hull"}));
  auto* simulate = app.add_subcommand("simulate", "Run the closed loop");
  simulate->add_flag("--baseline", o.baseline, "Also run the standard FCS-MPC baseline");
  auto* verify = app.add_subcommand("verify", "Re-check stored artifacts");

  for (auto* sub : {discretize, cycle, terminal, tube, feasible, simulate}) {
    sub->fallthrough();
  }
  verify->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitSchema;
  }

  try {
    if (!verify->parsed() && o.config.empty()) {
      throw Error(ErrorKind::kSchema, "--config is required");
    }
    if (discretize->parsed()) return RunDiscretize(o);
    if (cycle->parsed()) return RunCycle(o);
    if (terminal->parsed()) return RunTerminalCost(o);
    if (tube->parsed()) return RunTube(o);
    if (feasible->parsed()) return RunFeasible(o);
    if (simulate->parsed()) return RunSimulate(o);
    return RunVerify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
