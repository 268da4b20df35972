#include "lcmpc/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lcmpc/error.hpp"

namespace lcmpc {

namespace {

std::string FormatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void Dump(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        Dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ',';
        Dump(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += FormatDouble(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

std::string JoinCsv(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ',';
    s += FormatDouble(v(i));
  }
  return s;
}

const char* KindName(TubeKind k) {
  return k == TubeKind::kPolytopic ? "polytopic" : "ellipsoidal";
}

TubeKind KindFrom(const JsonPath& j) {
  const std::string s = j.AsString();
  if (s == "polytopic") return TubeKind::kPolytopic;
  if (s == "ellipsoidal") return TubeKind::kEllipsoidal;
  j.Fail("expected \"polytopic\" or \"ellipsoidal\"");
}

}  // namespace

std::string CanonicalDump(const Json& j) {
  std::string out;
  Dump(j, out);
  return out;
}

bool JsonPath::Has(const std::string& key) const {
  return j_->is_object() && j_->contains(key);
}

JsonPath JsonPath::operator[](const std::string& key) const {
  if (!j_->is_object()) Fail("expected an object");
  const std::string child = path_ + "/" + key;
  auto it = j_->find(key);
  if (it == j_->end()) throw Error(ErrorKind::kSchema, child + ": missing required field");
  return JsonPath(*it, child);
}

JsonPath JsonPath::operator[](std::size_t i) const {
  if (!j_->is_array()) Fail("expected an array");
  const std::string child = path_ + "/" + std::to_string(i);
  if (i >= j_->size()) throw Error(ErrorKind::kSchema, child + ": index out of range");
  return JsonPath((*j_)[i], child);
}

std::size_t JsonPath::size() const {
  if (!j_->is_array()) Fail("expected an array");
  return j_->size();
}

void JsonPath::Fail(const std::string& msg) const {
  throw Error(ErrorKind::kSchema, PointerOrRoot() + ": " + msg);
}

double JsonPath::AsDouble() const {
  if (j_->is_number()) return j_->get<double>();
  Fail("expected a number");
}

int JsonPath::AsInt() const {
  if (j_->is_number_integer()) return j_->get<int>();
  if (j_->is_number_float()) {
    const double v = j_->get<double>();
    if (v == std::floor(v) && std::abs(v) < 2e9) return static_cast<int>(v);
  }
  Fail("expected an integer");
}

long JsonPath::AsLong() const {
  if (j_->is_number_integer()) return j_->get<long>();
  return AsInt();
}

bool JsonPath::AsBool() const {
  if (j_->is_boolean()) return j_->get<bool>();
  Fail("expected a boolean");
}

std::string JsonPath::AsString() const {
  if (j_->is_string()) return j_->get<std::string>();
  Fail("expected a string");
}

Eigen::VectorXd JsonPath::AsVector() const {
  if (j_->is_number()) return Eigen::VectorXd::Constant(1, AsDouble());
  const std::size_t n = size();
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = (*this)[i].AsDouble();
  return v;
}

Eigen::MatrixXd JsonPath::AsMatrix() const {
  if (j_->is_number()) return Eigen::MatrixXd::Constant(1, 1, AsDouble());
  const std::size_t rows = size();
  if (rows == 0) Fail("expected a non-empty matrix");
  const std::size_t cols = (*this)[0].size();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const JsonPath row = (*this)[r];
    if (row.size() != cols) row.Fail("ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].AsDouble();
    }
  }
  return M;
}

std::vector<int> JsonPath::AsIntList() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].AsInt());
  return out;
}

Json ToJson(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json ToJson(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json ToJson(const Polytope& P) {
  return Json{{"H", ToJson(P.H())}, {"h", ToJson(P.h())}, {"dim", P.dim()}};
}

Json ToJson(const Ellipsoid& E) {
  return Json{{"Z", ToJson(E.Z)}, {"center", ToJson(E.center)}};
}

Json ToJson(const SwitchedAffineSystem& sys) {
  Json modes = Json::array();
  for (const Mode& m : sys.modes()) {
    modes.push_back(Json{{"A", ToJson(m.A)}, {"b", ToJson(m.b)}, {"C", ToJson(m.C)},
                         {"d", ToJson(m.d)}});
  }
  Json values = Json::array();
  for (const auto& u : sys.inputs().elements()) values.push_back(ToJson(u));
  return Json{{"modes", modes},
              {"inputs", Json{{"labels", sys.inputs().labels()}, {"values", values}}},
              {"constraints", ToJson(sys.state_constraints())}};
}

Json ToJson(const LimitCycle& cycle, const SwitchedAffineSystem& sys) {
  Json states = Json::array();
  Json outputs = Json::array();
  Json labels = Json::array();
  for (const auto& x : cycle.states) states.push_back(ToJson(x));
  for (const auto& y : cycle.outputs) outputs.push_back(ToJson(y));
  for (int u : cycle.input_indices) labels.push_back(sys.inputs().labels()[static_cast<std::size_t>(u)]);
  return Json{{"input_indices", cycle.input_indices},
              {"input_labels", labels},
              {"states", states},
              {"outputs", outputs},
              {"closure_residual", cycle.closure_residual},
              {"warning", cycle.warning}};
}

Json ToJson(const PeriodicTerminalCost& cost) {
  Json P = Json::array();
  for (const auto& M : cost.P) P.push_back(ToJson(M));
  return Json{{"P", P}, {"residuals", cost.residuals}};
}

Json ToJson(const TerminalCostReport& report) {
  return Json{{"min_eig_P", report.min_eig_P},
              {"decrease_residual", report.decrease_residual},
              {"tolerance", report.tolerance},
              {"worst_residual", report.WorstResidual()},
              {"pass", report.pass}};
}

Json ToJson(const ErrorTube& tube) {
  Json sets = Json::array();
  if (tube.kind == TubeKind::kPolytopic) {
    for (const auto& P : tube.polytopes) sets.push_back(ToJson(P));
  } else {
    for (const auto& E : tube.ellipsoids) sets.push_back(ToJson(E));
  }
  Json cons = Json::array();
  for (const auto& Z : tube.constraint_sets) cons.push_back(ToJson(Z));
  return Json{{"kind", KindName(tube.kind)},
              {"sets", sets},
              {"constraint_sets", cons},
              {"iterations", tube.iterations}};
}

Json ToJson(const StateTube& tube) {
  Json sets = Json::array();
  if (tube.kind == TubeKind::kPolytopic) {
    for (const auto& P : tube.polytopes) sets.push_back(ToJson(P));
  } else {
    for (const auto& E : tube.ellipsoids) sets.push_back(ToJson(E));
  }
  return Json{{"kind", KindName(tube.kind)}, {"sets", sets}};
}

Json ToJson(const TubeReport& report) {
  return Json{{"invariance_margin", report.invariance_margin},
              {"containment_margin", report.containment_margin},
              {"interior_margin", report.interior_margin},
              {"tolerance", report.tolerance},
              {"pass", report.pass}};
}

Json ToJson(const FeasibleSetResult& result) {
  Json steps = Json::array();
  for (const auto& pieces : result.per_step) {
    Json s = Json::array();
    for (const auto& P : pieces) s.push_back(ToJson(P));
    steps.push_back(std::move(s));
  }
  return Json{{"kind", result.kind == FeasibleKind::kExactUnion ? "exact" : "hull"},
              {"N", result.N},
              {"per_step", steps}};
}

Json ToJson(const SteadyStateMetrics& m) {
  Json j{{"window_start", m.window_start},
         {"window_length", m.window_length},
         {"mean_abs_error", ToJson(m.mean_abs_error)},
         {"mean_state", ToJson(m.mean_state)}};
  j["input_period"] = m.input_period ? Json(*m.input_period) : Json(nullptr);
  return j;
}

Polytope PolytopeFromJson(const JsonPath& j) {
  const Eigen::VectorXd h = j["h"].AsVector();
  if (h.size() == 0) {
    return Polytope(Eigen::MatrixXd(0, j["dim"].AsInt()), h);
  }
  const Eigen::MatrixXd H = j["H"].AsMatrix();
  if (H.rows() != h.size()) j["h"].Fail("length differs from rows of H");
  try {
    return Polytope(H, h);
  } catch (const Error& e) {
    j.Fail(e.what());
  }
}

Ellipsoid EllipsoidFromJson(const JsonPath& j) {
  try {
    return Ellipsoid(j["Z"].AsMatrix(), j["center"].AsVector());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw;
    j.Fail(e.what());
  }
}

SwitchedAffineSystem SystemFromJson(const JsonPath& j) {
  const JsonPath modes = j["modes"];
  std::vector<Mode> ms;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const JsonPath m = modes[i];
    ms.push_back(Mode{m["A"].AsMatrix(), m["b"].AsVector(), m["C"].AsMatrix(), m["d"].AsVector()});
  }
  const JsonPath in = j["inputs"];
  std::vector<Eigen::VectorXd> values;
  for (std::size_t i = 0; i < in["values"].size(); ++i) values.push_back(in["values"][i].AsVector());
  std::vector<std::string> labels;
  if (in.Has("labels")) {
    for (std::size_t i = 0; i < in["labels"].size(); ++i) labels.push_back(in["labels"][i].AsString());
  }
  try {
    return SwitchedAffineSystem(std::move(ms), FiniteInputSet(std::move(values), std::move(labels)),
                                PolytopeFromJson(j["constraints"]));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw;
    j.Fail(e.what());
  }
}

LimitCycle CycleFromJson(const JsonPath& j) {
  LimitCycle c;
  c.input_indices = j["input_indices"].AsIntList();
  for (std::size_t i = 0; i < j["states"].size(); ++i) c.states.push_back(j["states"][i].AsVector());
  for (std::size_t i = 0; i < j["outputs"].size(); ++i) c.outputs.push_back(j["outputs"][i].AsVector());
  if (c.states.size() != c.input_indices.size() || c.outputs.size() != c.input_indices.size()) {
    j.Fail("states, outputs and input_indices differ in length");
  }
  c.closure_residual = j["closure_residual"].AsDouble();
  if (j.Has("warning")) c.warning = j["warning"].AsString();
  return c;
}

PeriodicTerminalCost TerminalCostFromJson(const JsonPath& j) {
  PeriodicTerminalCost c;
  for (std::size_t i = 0; i < j["P"].size(); ++i) c.P.push_back(j["P"][i].AsMatrix());
  if (j.Has("residuals")) {
    for (std::size_t i = 0; i < j["residuals"].size(); ++i) c.residuals.push_back(j["residuals"][i].AsDouble());
  }
  return c;
}

ErrorTube ErrorTubeFromJson(const JsonPath& j) {
  ErrorTube t;
  t.kind = KindFrom(j["kind"]);
  const JsonPath sets = j["sets"];
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (t.kind == TubeKind::kPolytopic) t.polytopes.push_back(PolytopeFromJson(sets[i]));
    else t.ellipsoids.push_back(EllipsoidFromJson(sets[i]));
  }
  const JsonPath cons = j["constraint_sets"];
  for (std::size_t i = 0; i < cons.size(); ++i) t.constraint_sets.push_back(PolytopeFromJson(cons[i]));
  if (sets.size() != cons.size()) sets.Fail("length differs from constraint_sets");
  t.iterations = j["iterations"].AsInt();
  return t;
}

StateTube StateTubeFromJson(const JsonPath& j) {
  StateTube t;
  t.kind = KindFrom(j["kind"]);
  const JsonPath sets = j["sets"];
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (t.kind == TubeKind::kPolytopic) t.polytopes.push_back(PolytopeFromJson(sets[i]));
    else t.ellipsoids.push_back(EllipsoidFromJson(sets[i]));
  }
  return t;
}

FeasibleSetResult FeasibleFromJson(const JsonPath& j) {
  FeasibleSetResult r;
  const std::string kind = j["kind"].AsString();
  if (kind == "exact") r.kind = FeasibleKind::kExactUnion;
  else if (kind == "hull") r.kind = FeasibleKind::kOuterHull;
  else j["kind"].Fail("expected \"exact\" or \"hull\"");
  r.N = j["N"].AsInt();
  const JsonPath steps = j["per_step"];
  for (std::size_t s = 0; s < steps.size(); ++s) {
    std::vector<Polytope> pieces;
    for (std::size_t i = 0; i < steps[s].size(); ++i) pieces.push_back(PolytopeFromJson(steps[s][i]));
    r.per_step.push_back(std::move(pieces));
  }
  if (static_cast<int>(r.per_step.size()) != r.N + 1) steps.Fail("expected N + 1 entries");
  return r;
}

std::string CycleCsv(const LimitCycle& cycle, const SwitchedAffineSystem& sys) {
  std::ostringstream os;
  os << "phase,input_index,label";
  for (int i = 0; i < sys.nx(); ++i) os << ",x" << i;
  for (int i = 0; i < sys.ny(); ++i) os << ",y" << i;
  os << '\n';
  for (int j = 0; j < cycle.period(); ++j) {
    const int u = cycle.input_indices[static_cast<std::size_t>(j)];
    os << j << ',' << u << ',' << sys.inputs().labels()[static_cast<std::size_t>(u)] << ','
       << JoinCsv(cycle.states[static_cast<std::size_t>(j)]) << ','
       << JoinCsv(cycle.outputs[static_cast<std::size_t>(j)]) << '\n';
  }
  return os.str();
}

std::string TraceCsv(const ClosedLoopTrace& t) {
  std::ostringstream os;
  const Eigen::Index nx = t.states.front().size();
  const Eigen::Index nu = t.inputs.empty() ? 0 : t.inputs.front().size();
  const Eigen::Index ny = t.outputs.empty() ? 0 : t.outputs.front().size();
  os << "k";
  for (Eigen::Index i = 0; i < nx; ++i) os << ",x" << i;
  os << ",u_index";
  for (Eigen::Index i = 0; i < nu; ++i) os << ",u" << i;
  for (Eigen::Index i = 0; i < ny; ++i) os << ",y" << i;
  os << ",V,z_norm,feasible\n";
  for (std::size_t s = 0; s < t.feasible.size(); ++s) {
    os << t.k0 + static_cast<long>(s) << ',' << JoinCsv(t.states[s]) << ',';
    if (t.feasible[s]) {
      os << t.input_indices[s] << ',' << JoinCsv(t.inputs[s]) << ',' << JoinCsv(t.outputs[s])
         << ',' << FormatDouble(t.value[s]) << ',' << FormatDouble(t.tracking_error[s]) << ",1\n";
    } else {
      os << std::string(static_cast<std::size_t>(nu + ny + 3), ',') << "0\n";
    }
  }
  return os.str();
}

std::string VertexCsv(const std::vector<std::vector<Polytope>>& sets) {
  std::ostringstream os;
  os << "set,piece,vertex,x0,x1\n";
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t p = 0; p < sets[s].size(); ++p) {
      const auto verts = Vertices2d(sets[s][p]);
      for (std::size_t v = 0; v < verts.size(); ++v) {
        os << s << ',' << p << ',' << v << ',' << FormatDouble(verts[v](0)) << ','
           << FormatDouble(verts[v](1)) << '\n';
      }
    }
  }
  return os.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  f << contents;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kSchema, path + ": cannot open");
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kSchema, path + ": " + e.what());
  }
}

}  // namespace lcmpc
