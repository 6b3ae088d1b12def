#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace amgmatch {

using index_t = std::int64_t;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

} // namespace amgmatch
