#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

}  // namespace wg
