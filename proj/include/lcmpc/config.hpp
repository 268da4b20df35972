#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/cycle.hpp"
#include "lcmpc/model.hpp"
#include "lcmpc/serialize.hpp"
#include "lcmpc/sim.hpp"
#include "lcmpc/tube.hpp"

namespace lcmpc {

struct CycleSettings {
  int p = 1;
  CycleCostSpec cost;
  /// Fixed input sequence (indices); synthesized when absent.
  std::optional<std::vector<int>> sequence;
  bool constraints = true;
};

struct MpcSettings {
  int N = 1;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  TubeKind tube = TubeKind::kPolytopic;
  EllipsoidBackend backend = EllipsoidBackend::kMaxDet;
  int n_max = 500;
  bool warm_start = false;
  bool state_constraints = true;
};

struct FeasibleSettings {
  int N = 1;
  bool exact = true;
  bool hull = true;
};

struct SimulationSettings {
  Eigen::VectorXd x0;
  long k0 = 0;
  int steps = 0;
  double burn_in = 0.7;
  std::optional<BaselineMpcConfig> baseline;
};

struct ExperimentConfig {
  std::string name;
  SwitchedAffineSystem system;
  /// Present when the system was given in continuous time.
  std::optional<ContinuousSwitchedSystem> continuous;
  double Ts = 0.0;
  CycleSettings cycle;
  MpcSettings mpc;
  FeasibleSettings feasible;
  SimulationSettings simulation;
  std::string output_dir = "out";
};

/// Validates and builds a configuration. Every failure is a kSchema error
/// prefixed with the JSON pointer of the offending field.
ExperimentConfig ParseConfig(const Json& j);
ExperimentConfig LoadConfig(const std::string& path);

}  // namespace lcmpc
