#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>
#include <unsupported/Eigen/KroneckerProduct>

namespace oam4 {

using cd = std::complex<double>;

inline constexpr int kQubits = 4;
inline constexpr int kDim = 16;

/// Four-qubit state vector; index bit 3 is arm A, bit 0 is arm D, and a set
/// bit means the second element of the z basis (L, ell = -1).
using PureState4 = Eigen::Matrix<cd, kDim, 1>;
using DensityMatrix = Eigen::Matrix<cd, kDim, kDim>;
using Matrix16 = DensityMatrix;
using Qubit = Eigen::Vector2cd;

inline DensityMatrix projector(const PureState4& psi) { return psi * psi.adjoint(); }

/// U_A x U_B x U_C x U_D.
inline Matrix16 kron4(const std::array<Eigen::Matrix2cd, 4>& u) {
  const Eigen::Matrix4cd ab = Eigen::kroneckerProduct(u[0], u[1]);
  const Eigen::Matrix4cd cd_ = Eigen::kroneckerProduct(u[2], u[3]);
  return Eigen::kroneckerProduct(ab, cd_);
}

}  // namespace oam4
