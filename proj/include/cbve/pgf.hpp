// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cbve/kernel.hpp"

namespace cbve {

//! weight (e^{-rate x} - 1 + [compensated] rate x)
struct PoissonTerm {
  double weight = 0.0;
  double rate = 0.0;
  bool compensated = false;
};

//! weight int (e^{-rate z x} - 1 + [compensated] rate z x) kernel(dz)
struct PowerLawTerm {
  double weight = 0.0;
  PowerLaw kernel;
  double rate = 1.0;
  bool compensated = false;
};

/*!
 * \brief Probability generating function stored through its excess
 * E(x) = g(1 - x) - (1 - x).
 *
 * E(x) = e1 x + e2 x^2 + sum of Poisson and power-law terms. Each term is a
 * closed form, so evaluation near u = 1 keeps full relative precision.
 */
class Pgf {
 public:
  //! g(u) = u
  Pgf() = default;
  Pgf(double e1, double e2, std::vector<PoissonTerm> poisson,
      std::vector<PowerLawTerm> power_law = {});

  static Pgf identity() { return {}; }
  //! g(u) = p0 + p1 u + p2 u^2
  static Pgf quadratic(double p0, double p1, double p2);
  //! g(u) = e^{mu (u - 1)}
  static Pgf poisson(double mu);

  double e1() const { return e1_; }
  double e2() const { return e2_; }
  const std::vector<PoissonTerm>& poisson_terms() const { return poisson_; }
  const std::vector<PowerLawTerm>& power_law_terms() const { return power_law_; }
  bool is_identity() const;

  //! g(u) for u in [0, 1]
  double operator()(double u) const;
  //! E(x) = g(1 - x) - (1 - x)
  double excess(double x) const;
  //! D(x) = 1 - g(1 - x)
  double deficit(double x) const { return x - excess(x); }

  //! g'(1)
  double mean() const;
  //! g(0)
  double at_zero() const { return 1.0 - deficit(1.0); }
  //! g'(0)
  double slope_at_zero() const;
  //! Coefficient of u^n.
  double coefficient(int n) const;

 private:
  double e1_ = 0.0;
  double e2_ = 0.0;
  std::vector<PoissonTerm> poisson_;
  std::vector<PowerLawTerm> power_law_;
};

//! g_1(g_2(...g_n(u))) for the pgfs in order.
double compose(const std::vector<const Pgf*>& chain, double u);

}  // namespace cbve
