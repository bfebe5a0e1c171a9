#pragma once

#include <Eigen/Dense>

namespace steinlab {

using Scalar = double;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Index = Eigen::Index;

}  // namespace steinlab
