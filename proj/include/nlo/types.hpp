#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace nlo {

using Complex = std::complex<double>;

using Arrayd   = Eigen::ArrayXd;
using Arraycd  = Eigen::ArrayXcd;
using Matrixd  = Eigen::MatrixXd;
using Matrixcd = Eigen::MatrixXcd;
using Vectord  = Eigen::VectorXd;
using Vectorcd = Eigen::VectorXcd;
using Index    = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr Complex kI{0.0, 1.0};

/// Power attenuation in dB per cm -> Np per m (amplitude transmittance over
/// a distance d is exp(-alpha*d/2)).
inline double db_per_cm_to_np_per_m(double db_per_cm) {
  return db_per_cm * std::numbers::ln10 / 10.0 * 100.0;
}

inline double db_to_amplitude(double loss_db) {
  return std::pow(10.0, -loss_db / 20.0);
}

/// Raised when a propagation step produced non-finite values or an invalid state.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an integrator step is too coarse for the requested accuracy.
struct StepSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nlo
