#include "lcmpc/model.hpp"

#include <algorithm>

#include <unsupported/Eigen/MatrixFunctions>

#include "lcmpc/error.hpp"

namespace lcmpc {

FiniteInputSet::FiniteInputSet(std::vector<Eigen::VectorXd> elements,
                               std::vector<std::string> labels)
    : elements_(std::move(elements)), labels_(std::move(labels)) {
  if (elements_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "input set must not be empty");
  }
  const Eigen::Index nu = elements_.front().size();
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].size() != nu) {
      throw Error(ErrorKind::kInvalidArgument, "input elements differ in dimension");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (elements_[i] == elements_[j]) {
        throw Error(ErrorKind::kInvalidArgument,
                    "duplicate input element at index " + std::to_string(i));
      }
    }
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      labels_.push_back(std::to_string(i));
    }
  }
  if (labels_.size() != elements_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "label count differs from element count");
  }
}

const Eigen::VectorXd& FiniteInputSet::operator[](int i) const {
  if (i < 0 || i >= size()) {
    throw Error(ErrorKind::kInvalidArgument, "input index out of range");
  }
  return elements_[static_cast<std::size_t>(i)];
}

int FiniteInputSet::IndexOf(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

SwitchedAffineSystem::SwitchedAffineSystem(std::vector<Mode> modes,
                                           FiniteInputSet inputs,
                                           Polytope state_constraints)
    : modes_(std::move(modes)),
      inputs_(std::move(inputs)),
      state_constraints_(std::move(state_constraints)) {
  if (static_cast<int>(modes_.size()) != inputs_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one mode per input element required");
  }
  nx_ = static_cast<int>(modes_.front().A.rows());
  ny_ = static_cast<int>(modes_.front().C.rows());
  for (const Mode& m : modes_) {
    if (m.A.rows() != nx_ || m.A.cols() != nx_ || m.b.size() != nx_ ||
        m.C.rows() != ny_ || m.C.cols() != nx_ || m.d.size() != ny_) {
      throw Error(ErrorKind::kInvalidArgument, "inconsistent mode dimensions");
    }
  }
  if (state_constraints_.dim() != nx_) {
    throw Error(ErrorKind::kInvalidArgument, "state constraint dimension mismatch");
  }
  if (!state_constraints_.HasInterior() || !state_constraints_.IsBounded()) {
    throw Error(ErrorKind::kInvalidArgument,
                "state constraints must be bounded with nonempty interior");
  }
}

const Mode& SwitchedAffineSystem::mode(int i) const {
  if (i < 0 || i >= num_inputs()) {
    throw Error(ErrorKind::kInvalidArgument,
                "input index " + std::to_string(i) + " out of range");
  }
  return modes_[static_cast<std::size_t>(i)];
}

Eigen::VectorXd SwitchedAffineSystem::Next(const Eigen::VectorXd& x,
                                           int input_index) const {
  const Mode& m = mode(input_index);
  if (x.size() != nx_) {
    throw Error(ErrorKind::kInvalidArgument, "state dimension mismatch");
  }
  return m.A * x + m.b;
}

Eigen::VectorXd SwitchedAffineSystem::Output(const Eigen::VectorXd& x,
                                             int input_index) const {
  const Mode& m = mode(input_index);
  if (x.size() != nx_) {
    throw Error(ErrorKind::kInvalidArgument, "state dimension mismatch");
  }
  return m.C * x + m.d;
}

StepResult SwitchedAffineSystem::Step(const Eigen::VectorXd& x, int input_index) const {
  return {Next(x, input_index), Output(x, input_index)};
}

Eigen::MatrixXd MatrixExponential(const Eigen::MatrixXd& M) {
  return M.exp();
}

SwitchedAffineSystem DiscretizeZoh(const ContinuousSwitchedSystem& csys, double Ts) {
  if (!(Ts > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "sampling time must be positive");
  }
  std::vector<Mode> modes;
  for (const ContinuousMode& cm : csys.modes) {
    const Eigen::Index n = cm.A.rows();
    if (cm.A.cols() != n || cm.B.rows() != n || cm.B.cols() != csys.omega.size() ||
        cm.C.cols() != n || cm.D.rows() != cm.C.rows() ||
        cm.D.cols() != csys.omega.size()) {
      throw Error(ErrorKind::kInvalidArgument, "inconsistent continuous mode dimensions");
    }
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = cm.A;
    aug.topRightCorner(n, 1) = cm.B * csys.omega;
    const Eigen::MatrixXd E = MatrixExponential(aug * Ts);
    modes.push_back(Mode{E.topLeftCorner(n, n), E.topRightCorner(n, 1), cm.C,
                         cm.D * csys.omega});
  }
  return SwitchedAffineSystem(std::move(modes), csys.inputs, csys.state_constraints);
}

}  // namespace lcmpc
