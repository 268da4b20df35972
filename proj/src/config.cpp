#include "lcmpc/config.hpp"

#include "lcmpc/error.hpp"

namespace lcmpc {

namespace {

template <typename F>
auto Guard(const JsonPath& at, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw;
    at.Fail(e.what());
  }
}

FiniteInputSet ParseInputs(const JsonPath& j) {
  const JsonPath values = j["values"];
  std::vector<Eigen::VectorXd> elems;
  for (std::size_t i = 0; i < values.size(); ++i) elems.push_back(values[i].AsVector());
  std::vector<std::string> labels;
  if (j.Has("labels")) {
    const JsonPath l = j["labels"];
    if (l.size() != elems.size()) l.Fail("length differs from values");
    for (std::size_t i = 0; i < l.size(); ++i) labels.push_back(l[i].AsString());
  }
  return Guard(j, [&] { return FiniteInputSet(std::move(elems), std::move(labels)); });
}

Polytope ParseConstraints(const JsonPath& j) {
  if (j.Has("box") == (j.Has("H") || j.Has("h"))) {
    j.Fail("give exactly one of \"box\" or \"H\"/\"h\"");
  }
  if (j.Has("box")) {
    const JsonPath b = j["box"];
    const Eigen::VectorXd lo = b["lower"].AsVector();
    const Eigen::VectorXd hi = b["upper"].AsVector();
    if (lo.size() != hi.size() || !(lo.array() < hi.array()).all()) b.Fail("need lower < upper componentwise");
    return Guard(b, [&] { return Polytope::Box(lo, hi); });
  }
  const Eigen::MatrixXd H = j["H"].AsMatrix();
  const Eigen::VectorXd h = j["h"].AsVector();
  if (H.rows() != h.size()) j["h"].Fail("length differs from rows of H");
  const Polytope X = Guard(j, [&] { return Polytope(H, h); });
  if (!X.IsBounded() || X.IsEmpty()) j.Fail("constraint set must be bounded and nonempty");
  return X;
}

void ParseSystem(const JsonPath& root, ExperimentConfig& cfg) {
  const JsonPath sys = root["system"];
  const FiniteInputSet inputs = ParseInputs(root["inputs"]);
  const Polytope X = ParseConstraints(root["constraints"]);
  if (sys.Has("continuous") == sys.Has("discrete")) {
    sys.Fail("give exactly one of \"continuous\" or \"discrete\"");
  }
  if (sys.Has("discrete")) {
    if (sys.Has("Ts") || sys.Has("fs")) sys.Fail("sampling time only applies to continuous systems");
    const JsonPath modes = sys["discrete"]["modes"];
    if (modes.size() != static_cast<std::size_t>(inputs.size())) {
      modes.Fail("need one mode per input element");
    }
    std::vector<Mode> ms;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const JsonPath m = modes[i];
      ms.push_back(Mode{m["A"].AsMatrix(), m["b"].AsVector(), m["C"].AsMatrix(), m["d"].AsVector()});
    }
    cfg.system = Guard(sys, [&] { return SwitchedAffineSystem(std::move(ms), inputs, X); });
    return;
  }
  if (sys.Has("Ts") == sys.Has("fs")) sys.Fail("give exactly one of \"Ts\" or \"fs\"");
  if (sys.Has("Ts")) {
    cfg.Ts = sys["Ts"].AsDouble();
  } else {
    const double fs = sys["fs"].AsDouble();
    if (!(fs > 0)) sys["fs"].Fail("must be positive");
    cfg.Ts = 1.0 / fs;
  }
  if (!(cfg.Ts > 0)) sys.Fail("sampling time must be positive");
  const JsonPath c = sys["continuous"];
  ContinuousSwitchedSystem cs;
  cs.omega = c["omega"].AsVector();
  const JsonPath modes = c["modes"];
  if (modes.size() != static_cast<std::size_t>(inputs.size())) {
    modes.Fail("need one mode per input element");
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const JsonPath m = modes[i];
    cs.modes.push_back(ContinuousMode{m["A"].AsMatrix(), m["B"].AsMatrix(), m["C"].AsMatrix(),
                                      m["D"].AsMatrix()});
  }
  cs.inputs = inputs;
  cs.state_constraints = X;
  cfg.system = Guard(c, [&] { return DiscretizeZoh(cs, cfg.Ts); });
  cfg.continuous = std::move(cs);
}

void ParseCycle(const JsonPath& j, ExperimentConfig& cfg) {
  CycleSettings& s = cfg.cycle;
  s.p = j["p"].AsInt();
  if (s.p < 1) j["p"].Fail("must be >= 1");
  const JsonPath ref = j["reference"];
  if (ref.value().is_array() && ref.size() > 0 && ref.value()[0].is_array()) {
    for (std::size_t i = 0; i < ref.size(); ++i) s.cost.reference.push_back(ref[i].AsVector());
  } else {
    s.cost.reference.push_back(ref.AsVector());
  }
  for (std::size_t i = 0; i < s.cost.reference.size(); ++i) {
    if (s.cost.reference[i].size() != cfg.system.ny()) ref.Fail("reference has wrong dimension");
  }
  if (j.Has("norm")) {
    const std::string n = j["norm"].AsString();
    if (n == "1") s.cost.norm = CycleNorm::kOne;
    else if (n == "2") s.cost.norm = CycleNorm::kTwo;
    else if (n == "inf") s.cost.norm = CycleNorm::kInf;
    else j["norm"].Fail("expected \"1\", \"2\" or \"inf\"");
  }
  if (j.Has("constraints")) s.constraints = j["constraints"].AsBool();
  if (j.Has("sequence")) {
    const JsonPath seq = j["sequence"];
    std::vector<int> idx;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const int u = cfg.system.inputs().IndexOf(seq[i].AsString());
      if (u < 0) seq[i].Fail("unknown input label");
      idx.push_back(u);
    }
    if (static_cast<int>(idx.size()) != s.p) seq.Fail("length differs from p");
    s.sequence = std::move(idx);
  }
}

void ParseMpc(const JsonPath& j, ExperimentConfig& cfg) {
  MpcSettings& m = cfg.mpc;
  m.N = j["N"].AsInt();
  if (m.N < 1) j["N"].Fail("must be >= 1");
  m.Q = j["Q"].AsMatrix();
  m.R = j["R"].AsMatrix();
  if (m.Q.rows() != cfg.system.nx() || m.Q.cols() != cfg.system.nx()) j["Q"].Fail("wrong dimension");
  if (m.R.rows() != cfg.system.nu() || m.R.cols() != cfg.system.nu()) j["R"].Fail("wrong dimension");
  Guard(j, [&] { return StageCost(m.Q, m.R); });
  if (j.Has("tube")) {
    const std::string t = j["tube"].AsString();
    if (t == "polytopic") m.tube = TubeKind::kPolytopic;
    else if (t == "ellipsoidal") m.tube = TubeKind::kEllipsoidal;
    else j["tube"].Fail("expected \"polytopic\" or \"ellipsoidal\"");
  }
  if (j.Has("backend")) {
    const std::string b = j["backend"].AsString();
    if (b == "maxdet") m.backend = EllipsoidBackend::kMaxDet;
    else if (b == "lyapunov") m.backend = EllipsoidBackend::kLyapunovLevel;
    else j["backend"].Fail("expected \"maxdet\" or \"lyapunov\"");
  }
  if (j.Has("n_max")) {
    m.n_max = j["n_max"].AsInt();
    if (m.n_max < 1) j["n_max"].Fail("must be >= 1");
  }
  if (j.Has("warm_start")) m.warm_start = j["warm_start"].AsBool();
  if (j.Has("state_constraints")) m.state_constraints = j["state_constraints"].AsBool();
}

void ParseSimulation(const JsonPath& j, ExperimentConfig& cfg) {
  SimulationSettings& s = cfg.simulation;
  s.x0 = j["x0"].AsVector();
  if (s.x0.size() != cfg.system.nx()) j["x0"].Fail("wrong dimension");
  if (j.Has("k0")) s.k0 = j["k0"].AsLong();
  s.steps = j["steps"].AsInt();
  if (s.steps < 1) j["steps"].Fail("must be >= 1");
  if (j.Has("burn_in")) {
    s.burn_in = j["burn_in"].AsDouble();
    if (!(s.burn_in >= 0 && s.burn_in < 1)) j["burn_in"].Fail("must lie in [0, 1)");
  }
  if (j.Has("baseline")) {
    const JsonPath b = j["baseline"];
    if (b.Has("enabled") && !b["enabled"].AsBool()) return;
    BaselineMpcConfig bc;
    bc.N = b.Has("N") ? b["N"].AsInt() : cfg.mpc.N;
    if (bc.N < 1) b["N"].Fail("must be >= 1");
    if (b.Has("output_weight")) bc.output_weight = b["output_weight"].AsDouble();
    if (b.Has("input_rate_weight")) bc.input_rate_weight = b["input_rate_weight"].AsDouble();
    if (b.Has("terminal_weight")) bc.terminal_weight = b["terminal_weight"].AsDouble();
    if (bc.output_weight < 0 || bc.input_rate_weight < 0 || bc.terminal_weight < 0) {
      b.Fail("weights must be nonnegative");
    }
    if (b.Has("reference")) {
      bc.reference = b["reference"].AsVector();
    } else if (cfg.cycle.cost.reference.size() == 1) {
      bc.reference = cfg.cycle.cost.reference.front();
    } else {
      b.Fail("missing required field \"reference\" for a time-varying cycle reference");
    }
    if (bc.reference.size() != cfg.system.ny()) b.Fail("reference has wrong dimension");
    bc.state_constraints = cfg.mpc.state_constraints;
    bc.warm_start = cfg.mpc.warm_start;
    s.baseline = bc;
  }
}

}  // namespace

ExperimentConfig ParseConfig(const Json& doc) {
  const JsonPath root(doc);
  if (!doc.is_object()) root.Fail("expected an object");
  ExperimentConfig cfg;
  if (root.Has("name")) cfg.name = root["name"].AsString();
  ParseSystem(root, cfg);
  ParseCycle(root["cycle"], cfg);
  ParseMpc(root["mpc"], cfg);
  cfg.feasible.N = cfg.mpc.N;
  if (root.Has("feasible")) {
    const JsonPath f = root["feasible"];
    if (f.Has("N")) cfg.feasible.N = f["N"].AsInt();
    if (cfg.feasible.N < 0) f["N"].Fail("must be >= 0");
    if (f.Has("exact")) cfg.feasible.exact = f["exact"].AsBool();
    if (f.Has("hull")) cfg.feasible.hull = f["hull"].AsBool();
  }
  ParseSimulation(root["simulation"], cfg);
  if (root.Has("output")) cfg.output_dir = root["output"]["dir"].AsString();
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) { return ParseConfig(ReadJsonFile(path)); }

}  // namespace lcmpc
