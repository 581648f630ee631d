#pragma once

#include <vector>

#include <Eigen/Dense>

namespace domd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One vector per learner node, indexed by node id.
using NodeVectors = std::vector<Vector>;

}  // namespace domd
