// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace latres {

inline constexpr const char* kEngineVersion = "0.1.0";

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kImagUnit{0.0, 1.0};

// Default numeric parameters, centralized (see README for the table).
namespace defaults {
inline constexpr int kWindow = 200;
inline constexpr int kGrid = 1024;
inline constexpr int kContourNodes = 256;
inline constexpr int kMaxContourNodes = 4096;
inline constexpr int kRieszNodes = 64;
inline constexpr double kContinuationRadius = 0.25;  // epsilon_0
inline constexpr double kBandDistance = 1e-3;        // delta_band
inline constexpr double kMinSeparation = 1e-4;       // min_sep
inline constexpr double kRankRelThreshold = 1e-10;
inline constexpr double kIndexResidual = 1e-6;
}  // namespace defaults

// Errors split by exit-code class: validation (bad inputs/config, exit 2)
// vs numerical (solver/quadrature failures, exit 3).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown by the quadrature layer when a contour passes too close to a
// characteristic value; callers react by perturbing the radius.
class ContourError : public NumericalError {
 public:
  explicit ContourError(const std::string& msg) : NumericalError(msg) {}
};

// Thrown when an argument jump between adjacent contour nodes exceeds pi/2;
// callers react by doubling the node count.
class ResolutionError : public NumericalError {
 public:
  explicit ResolutionError(const std::string& msg) : NumericalError(msg) {}
};

void ensure_finite(const CMatrix& m, const std::string& what);

// Number of worker threads: ENGINE_THREADS if set, else hardware concurrency.
int engine_threads();

}  // namespace latres
