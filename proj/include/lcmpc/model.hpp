#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/geometry.hpp"

namespace lcmpc {

/// Ordered, duplicate-free list of admissible input vectors. Element i is
/// always addressed by index i; labels are optional display names.
class FiniteInputSet {
 public:
  FiniteInputSet() = default;
  explicit FiniteInputSet(std::vector<Eigen::VectorXd> elements,
                          std::vector<std::string> labels = {});

  int size() const { return static_cast<int>(elements_.size()); }
  int input_dim() const { return static_cast<int>(elements_.front().size()); }
  const Eigen::VectorXd& operator[](int i) const;
  const std::vector<Eigen::VectorXd>& elements() const { return elements_; }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Index of a label, or -1.
  int IndexOf(const std::string& label) const;

 private:
  std::vector<Eigen::VectorXd> elements_;
  std::vector<std::string> labels_;
};

/// One affine subsystem: x+ = A x + b, y = C x + d.
struct Mode {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};

struct StepResult {
  Eigen::VectorXd x_next;
  Eigen::VectorXd y;
};

/// Discrete-time switched affine system with one mode per input element and
/// a bounded polytopic state constraint set.
class SwitchedAffineSystem {
 public:
  SwitchedAffineSystem() = default;
  SwitchedAffineSystem(std::vector<Mode> modes, FiniteInputSet inputs,
                       Polytope state_constraints);

  int nx() const { return nx_; }
  int nu() const { return inputs_.input_dim(); }
  int ny() const { return ny_; }
  int num_inputs() const { return inputs_.size(); }

  const Mode& mode(int i) const;
  const std::vector<Mode>& modes() const { return modes_; }
  const FiniteInputSet& inputs() const { return inputs_; }
  const Polytope& state_constraints() const { return state_constraints_; }

  StepResult Step(const Eigen::VectorXd& x, int input_index) const;
  /// A_i x + b_i without the output.
  Eigen::VectorXd Next(const Eigen::VectorXd& x, int input_index) const;
  Eigen::VectorXd Output(const Eigen::VectorXd& x, int input_index) const;

 private:
  std::vector<Mode> modes_;
  FiniteInputSet inputs_;
  Polytope state_constraints_;
  int nx_ = 0;
  int ny_ = 0;
};

/// Continuous-time mode dx/dt = A_c x + B_c w, y = C_c x + D_c w.
struct ContinuousMode {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
};

struct ContinuousSwitchedSystem {
  std::vector<ContinuousMode> modes;
  /// Constant exogenous input.
  Eigen::VectorXd omega;
  FiniteInputSet inputs;
  Polytope state_constraints;
};

/// Zero-order-hold discretization of every mode with sampling time Ts.
/// Uses the augmented exponential exp([[A_c, B_c w], [0, 0]] Ts), so singular
/// A_c needs no special handling. Output maps are carried over unchanged.
SwitchedAffineSystem DiscretizeZoh(const ContinuousSwitchedSystem& csys, double Ts);

/// exp(M) by scaling and squaring with a Pade approximant.
Eigen::MatrixXd MatrixExponential(const Eigen::MatrixXd& M);

}  // namespace lcmpc
