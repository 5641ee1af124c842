#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace radcom {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Thrown when a caller violates a documented precondition (bad dimensions,
// non-Hermitian input where Hermitian is required, out-of-range options, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a matrix that was promised to be numerically rank-one cannot be
// factored as w w^H within the requested residual bound.
class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-fatal diagnostics (e.g. tiny negative eigenvalues clipped to zero) are
// routed through a process-wide handler so tests and tools can redirect them.
using WarnHandler = void (*)(const std::string& message);
void set_warn_handler(WarnHandler handler);  // nullptr restores the default
void warn(const std::string& message);       // default prints to stderr

}  // namespace radcom
