#pragma once

// Transmit beampattern synthesis for a uniform linear array.
//
// The array emits with covariance R (Hermitian PSD, tr R = transmit power);
// the power radiated towards angle theta is P(theta) = a(theta)^H R a(theta)
// with a(theta) the ULA steering vector. The reference design matches a
// rectangular multi-beam template d(theta) in the least-squares sense,
//
//   minimize_{delta >= 0, R >= 0, tr R = p}  sum_i |delta d_i - P(theta_i)|^2,
//
// over a uniform angular grid; delta scales the template so only the shape is
// prescribed. Downstream beamformer designs constrain their own covariance to
// stay within a fractional matching-error budget of this reference optimum.

#include <vector>

#include "radcom/conic_solver.hpp"
#include "radcom/hermitian.hpp"
#include "radcom/types.hpp"

namespace radcom {

// Uniform grid over [-90, 90] degrees; an odd point count keeps 0 on grid.
class AngularGrid {
 public:
  explicit AngularGrid(int points = 181);

  int size() const { return static_cast<int>(theta_deg_.size()); }
  const RVector& theta_deg() const { return theta_deg_; }
  double spacing_deg() const;

 private:
  RVector theta_deg_;
};

// 0/1 template with value 1 inside any [c - width/2, c + width/2] band.
RVector desired_pattern(const AngularGrid& grid,
                        const std::vector<double>& center_angles_deg,
                        double beam_width_deg);

// P(theta_i) = a(theta_i)^H R a(theta_i) for every grid angle.
RVector evaluate_pattern(const HermitianMatrix& cov, const AngularGrid& grid);

// Matching error sum_i (delta d_i - p_i)^2.
double pattern_error(const RVector& desired, const RVector& pattern,
                     double delta);

// argmin_{delta >= 0} pattern_error(desired, pattern, delta), closed form.
double optimal_delta(const RVector& desired, const RVector& pattern);

struct IdealPattern {
  HermitianMatrix cov = HermitianMatrix::zero(1);  // trace = p_max
  double delta_star = 0.0;
  double error_star = 0.0;  // minimal matching error
  RVector pattern;          // achieved pattern on the grid
  RVector desired;          // template the solve matched against
};

// Least-squares reference covariance via the PSD program above.
// Throws SolveError if the underlying conic solve does not reach optimality.
IdealPattern solve_ideal_pattern(int n_antennas, double p_max,
                                 const AngularGrid& grid,
                                 const RVector& desired,
                                 const SolverOptions& options = {});

// Fractional excess matching error of cov over the reference optimum:
// (error(cov, delta_star) - error_star) / error_star.
double mismatch_ratio(const HermitianMatrix& cov, const IdealPattern& ideal,
                      const AngularGrid& grid);

// Thrown when a conic solve that callers rely on fails to reach optimality.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, SolverStatus status)
      : std::runtime_error(what), status_(status) {}
  SolverStatus status() const { return status_; }

 private:
  SolverStatus status_;
};

}  // namespace radcom
