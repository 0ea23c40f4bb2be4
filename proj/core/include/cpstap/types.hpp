#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cpstap {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using RSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline cd phasor(double cycles) {
    return std::polar(1.0, kTwoPi * cycles);
}

}  // namespace cpstap
