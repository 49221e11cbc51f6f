#pragma once

#include <Eigen/Dense>

namespace memlag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

} // namespace memlag
