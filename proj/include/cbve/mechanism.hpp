// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cbve/environment.hpp"

namespace cbve {

//! phi(lambda) = b1 lambda + c lambda^2 + int K1(lambda, z) m(dz)
double phi(const Coefficients& coef, double lambda);
double phi(const EnvironmentSpec& env, double s, double lambda);

//! Truncation level c_k = k^{1/3} / C0 - 1.
double truncation_cutoff(int k, double c0);

//! b_k = b1 - int_(1, c_k] z m(dz)
double drift_k(const Coefficients& coef, double ck);

//! phi_{0,k}(lambda) = c lambda^2 + int_(0, c_k] K(lambda, z) m(dz)
double phi0k(const Coefficients& coef, double lambda, double ck);

//! Same, at time s; throws unless 1 <= c_k <= k.
double phi0k(const EnvironmentSpec& env, double s, double lambda, int k,
             double c0);

//! M_phi(lambda) = (1 + lambda)^2 C0
double phi_bound(double c0, double lambda);

//! M'_phi(lambda1, lambda2) = M_phi(lambda2 + e^{-1} / lambda1)
double phi_lipschitz_bound(double c0, double lambda1, double lambda2);

/*!
 * \brief Read-only mechanism evaluator bound to one environment.
 *
 * Kernel integrals are closed-form, so no lambda-dependent state is kept.
 */
class MechanismView {
 public:
  explicit MechanismView(const EnvironmentSpec& env);

  const EnvironmentSpec& env() const { return *env_; }
  double c0() const { return c0_; }

  double phi(double s, double lambda) const { return cbve::phi(*env_, s, lambda); }
  double phi0k(double s, double lambda, int k) const {
    return cbve::phi0k(*env_, s, lambda, k, c0_);
  }
  double bound(double lambda) const { return phi_bound(c0_, lambda); }

 private:
  const EnvironmentSpec* env_;
  double c0_;
};

}  // namespace cbve
