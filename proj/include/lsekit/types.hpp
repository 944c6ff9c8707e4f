#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lsekit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A set of n points in R^d stored one point per row.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Point = Eigen::RowVectorXd;
using PointRef = Eigen::Ref<const Point>;

// Execution policy for the data-parallel kernels. `serial` is the reference
// path the tests compare the parallel path against.
enum class Exec { serial, parallel };

// Per-point membership flags; 1 = super-level (H), 0 = sub-level (L).
using MembershipFlags = std::vector<std::uint8_t>;

}  // namespace lsekit
