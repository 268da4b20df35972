#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lcmpc/cycle.hpp"
#include "lcmpc/feasible.hpp"
#include "lcmpc/geometry.hpp"
#include "lcmpc/lyap.hpp"
#include "lcmpc/model.hpp"
#include "lcmpc/sim.hpp"
#include "lcmpc/tube.hpp"

namespace lcmpc {

using Json = nlohmann::json;

/// Sorted keys, no whitespace, doubles with 17 significant digits.
std::string CanonicalDump(const Json& j);

/// Read-only cursor into a JSON document that remembers its pointer path,
/// so every failure names the offending location.
class JsonPath {
 public:
  JsonPath(const Json& j, std::string path = "") : j_(&j), path_(std::move(path)) {}

  const Json& value() const { return *j_; }
  const std::string& path() const { return path_; }
  std::string PointerOrRoot() const { return path_.empty() ? "/" : path_; }

  bool Has(const std::string& key) const;
  JsonPath operator[](const std::string& key) const;
  JsonPath operator[](std::size_t i) const;
  std::size_t size() const;

  double AsDouble() const;
  int AsInt() const;
  long AsLong() const;
  bool AsBool() const;
  std::string AsString() const;
  Eigen::VectorXd AsVector() const;
  /// Array of rows; a bare number is read as a 1x1 matrix.
  Eigen::MatrixXd AsMatrix() const;
  std::vector<int> AsIntList() const;

  /// Throws kSchema at this location.
  [[noreturn]] void Fail(const std::string& msg) const;

 private:
  const Json* j_;
  std::string path_;
};

Json ToJson(const Eigen::MatrixXd& M);
Json ToJson(const Eigen::VectorXd& v);
Json ToJson(const Polytope& P);
Json ToJson(const Ellipsoid& E);
Json ToJson(const SwitchedAffineSystem& sys);
Json ToJson(const LimitCycle& cycle, const SwitchedAffineSystem& sys);
Json ToJson(const PeriodicTerminalCost& cost);
Json ToJson(const TerminalCostReport& report);
Json ToJson(const ErrorTube& tube);
Json ToJson(const StateTube& tube);
Json ToJson(const TubeReport& report);
Json ToJson(const FeasibleSetResult& result);
Json ToJson(const SteadyStateMetrics& metrics);

Polytope PolytopeFromJson(const JsonPath& j);
Ellipsoid EllipsoidFromJson(const JsonPath& j);
SwitchedAffineSystem SystemFromJson(const JsonPath& j);
LimitCycle CycleFromJson(const JsonPath& j);
PeriodicTerminalCost TerminalCostFromJson(const JsonPath& j);
ErrorTube ErrorTubeFromJson(const JsonPath& j);
StateTube StateTubeFromJson(const JsonPath& j);
FeasibleSetResult FeasibleFromJson(const JsonPath& j);

/// One row per phase: phase, input index, label, states, outputs.
std::string CycleCsv(const LimitCycle& cycle, const SwitchedAffineSystem& sys);
/// One row per step: k, x, u-index, u, y, V, |z|, feasible.
std::string TraceCsv(const ClosedLoopTrace& trace);
/// Planar vertex listing, one row per vertex: set, piece, vertex, x0, x1.
std::string VertexCsv(const std::vector<std::vector<Polytope>>& sets);

void WriteFile(const std::string& path, const std::string& contents);
Json ReadJsonFile(const std::string& path);

}  // namespace lcmpc
