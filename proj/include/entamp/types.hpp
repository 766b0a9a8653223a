#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace entamp {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Frequencies are quoted as f/(2π) in MHz; internally everything is rad/μs.
constexpr double from_mhz(double f_mhz) { return kTwoPi * f_mhz; }
constexpr double to_mhz(double omega) { return omega / kTwoPi; }

// Raised for malformed user input (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when propagation leaves the physical domain (CLI exit code 3).
class PropagationError : public std::runtime_error {
 public:
  explicit PropagationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace entamp
