#pragma once

#include <array>
#include <string_view>

#include <Eigen/Dense>

namespace optomech {

/// Fluctuation basis shared by every module: mechanics first, then the
/// optical quadratures. Matrices are indexed with these constants only.
enum Quadrature : int {
  mech_q = 0,
  mech_p = 1,
  opt_x = 2,
  opt_y = 3,
};

inline constexpr int basis_size = 4;
inline constexpr std::array<std::string_view, basis_size> basis_labels{"dq", "dp", "dX", "dY"};

using Matrix4 = Eigen::Matrix4d;
using Matrix2 = Eigen::Matrix2d;

}  // namespace optomech
