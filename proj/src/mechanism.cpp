// SPDX-License-Identifier: Apache-2.0
#include "cbve/mechanism.hpp"

#include <cmath>
#include <sstream>

#include "cbve/error.hpp"

namespace cbve {

double phi(const Coefficients& coef, double lambda) {
  double jump = coef.kernel.empty() ? 0.0 : coef.kernel.k1_integral(lambda).value;
  return coef.b1 * lambda + coef.c * lambda * lambda + jump;
}

double phi(const EnvironmentSpec& env, double s, double lambda) {
  return phi(env.coefficients(s), lambda);
}

double truncation_cutoff(int k, double c0) {
  return std::cbrt(static_cast<double>(k)) / c0 - 1.0;
}

double drift_k(const Coefficients& coef, double ck) {
  return coef.b1 - coef.kernel.moment(1.0, 1.0, ck);
}

double phi0k(const Coefficients& coef, double lambda, double ck) {
  double jump = coef.kernel.empty() ? 0.0 : coef.kernel.k_integral(lambda, ck).value;
  return coef.c * lambda * lambda + jump;
}

double phi0k(const EnvironmentSpec& env, double s, double lambda, int k,
             double c0) {
  double ck = truncation_cutoff(k, c0);
  if (!(ck >= 1.0 && ck <= k)) {
    std::ostringstream os;
    os << "k = " << k << " gives c_k = " << ck
       << ", outside the required range 1 <= c_k <= k";
    throw InvalidArgument("mechanism", "phi0k", os.str());
  }
  return phi0k(env.coefficients(s), lambda, ck);
}

double phi_bound(double c0, double lambda) {
  return (1.0 + lambda) * (1.0 + lambda) * c0;
}

double phi_lipschitz_bound(double c0, double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || lambda1 > lambda2) {
    throw InvalidArgument("mechanism", "phi_bounds",
                          "need 0 < lambda1 <= lambda2");
  }
  return phi_bound(c0, lambda2 + std::exp(-1.0) / lambda1);
}

MechanismView::MechanismView(const EnvironmentSpec& env)
    : env_(&env), c0_(compute_c0(env)) {}

}  // namespace cbve
