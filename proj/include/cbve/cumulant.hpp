// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cbve/environment.hpp"

namespace cbve {

inline constexpr double kDefaultTolerance = 1e-10;

/*!
 * \brief Integrates v(r, t; lambda) = lambda - int_(r,t] phi(s, v(s)) gamma(ds)
 * backward from t.
 *
 * Continuous pieces use RK4 with step halving; gamma-atoms are explicit jumps
 * v(s-) = v(s) - phi(s, v(s)) dgamma(s).
 */
class BackwardSolver {
 public:
  BackwardSolver(const EnvironmentSpec& env, double t, double lambda,
                 double tol = kDefaultTolerance);

  //! Current time r with value v(r, t).
  double time() const { return time_; }
  double value() const { return value_; }
  double error() const { return error_; }

  //! Integrate down to r <= time().
  void advance_to(double r);

 private:
  void flow(double density, const Coefficients& coef, double span);

  const EnvironmentSpec* env_;
  double tol_;
  double time_;
  double value_;
  double error_ = 0.0;
};

//! v(r, t; lambda) with an absolute error estimate.
Estimate solve_backward(const EnvironmentSpec& env, double r, double t,
                        double lambda, double tol = kDefaultTolerance);

//! Values v(r, t; lambda) on a grid for fixed t.
struct CumulantSolution {
  double t = 0.0;
  std::vector<double> lambdas;
  std::vector<double> rs;
  //! values[l][i] = v(rs[i], t; lambdas[l])
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> errors;
};

CumulantSolution solve_grid(const EnvironmentSpec& env, double t,
                            std::vector<double> rs, std::vector<double> lambdas,
                            double tol = kDefaultTolerance);

//! Uniform points on [0, t] merged with atom times and piece boundaries.
std::vector<double> default_r_grid(const EnvironmentSpec& env, double t, int n);

//! e^{-x v(r, t; lambda)}; x may be infinite.
double transition_laplace(const EnvironmentSpec& env, double x, double r,
                          double t, double lambda, double tol = kDefaultTolerance);

//---------------------------------------------------------------------------//
// Envelope constants
//---------------------------------------------------------------------------//

struct EnvelopeConstants {
  double horizon = 0.0;
  double a = 0.0;
  double b = 0.0;
  double eta = 2.0;
  double c0 = 0.0;
  double upper = 0.0;   //!< U
  double lower = 0.0;   //!< l
  double f = 0.0;
  double h = 0.0;
  double epsilon = 0.0;
  double total_variation = 0.0;  //!< ||alpha||(T)
  double atom_product = 1.0;     //!< prod [1 + (0 ^ dalpha)]
  //! alpha at segment endpoints, right-continuous
  std::vector<double> alpha_times;
  std::vector<double> alpha_values;

  double alpha(double r) const;
};

//! Lambda(s) density of alpha with respect to gamma.
double envelope_density(const Coefficients& coef, const EnvelopeConstants& e);

EnvelopeConstants envelope_bounds(const EnvironmentSpec& env, double horizon,
                                  double a, double b, double eta = 2.0);

}  // namespace cbve
