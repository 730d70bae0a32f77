#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace odo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Ordinal marking a hierarchy neighbor outside the truncated index set.
inline constexpr std::uint32_t kOutside = 0xffffffffu;

inline bool is_inf(double x) { return std::isinf(x); }

} // namespace odo
