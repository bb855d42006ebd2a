#pragma once

#include <Eigen/Core>

namespace simplicone {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace simplicone
