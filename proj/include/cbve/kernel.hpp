// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace cbve {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

//! Value with an absolute error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

//---------------------------------------------------------------------------//
// Scalar kernels
//---------------------------------------------------------------------------//

//! e^{-y} - 1 + y, accurate for small y.
double compensated_exp(double y);

//! K1(lambda, z) = e^{-lambda z} - 1 + lambda z 1{z <= 1}.
double k1(double lambda, double z);

//! K(lambda, z) = e^{-lambda z} - 1 + lambda z.
double k_func(double lambda, double z);

//---------------------------------------------------------------------------//
// Power-law integrals
//---------------------------------------------------------------------------//

/*!
 * \brief Integrand shape h(y) = p0 + p1 y + e^{-y} (q0 + q1 y).
 *
 * Integrals of y^{-1-alpha} h(y) are split at y = 1: a Taylor series below
 * and incomplete gamma functions above.
 */
struct ExpPoly {
  double p0 = 0.0;
  double p1 = 0.0;
  double q0 = 0.0;
  double q1 = 0.0;

  double operator()(double y) const;

  //! e^{-y} - 1 + y
  static ExpPoly compensated() { return {-1.0, 1.0, 1.0, 0.0}; }
  //! e^{-y} - 1
  static ExpPoly uncompensated() { return {-1.0, 0.0, 1.0, 0.0}; }
  //! 1 - e^{-y}(1 + y)
  static ExpPoly tail_mass() { return {1.0, 0.0, -1.0, -1.0}; }
};

//! Integral of y^{-1-alpha} h(y) over [lo, hi], hi may be infinite.
Estimate power_exp_integral(double alpha, double lo, double hi, const ExpPoly& h);

//! Integral of y^{p} over [lo, hi]; throws DivergentIntegral if infinite.
double power_integral(double p, double lo, double hi);

//! Upper incomplete gamma Gamma(s, x) for s > -2 and x > 0.
double upper_gamma(double s, double x);

//---------------------------------------------------------------------------//
// Jump kernels
//---------------------------------------------------------------------------//

struct KernelAtom {
  double z = 0.0;
  double w = 0.0;
};

//! m(dz) = scale z^{-1-alpha} dz on (zmin, zmax].
struct PowerLaw {
  double alpha = 0.5;
  double scale = 1.0;
  double zmin = 0.0;
  double zmax = kInf;

  //! Same density restricted to (max(a, zmin), min(b, zmax)].
  std::optional<PowerLaw> restricted(double a, double b) const;

  //! Integral of z^p m(dz) over the support.
  double moment(double p) const;

  //! Integral of h(rate z) m(dz) over the support.
  Estimate integrate(const ExpPoly& h, double rate) const;
};

/*!
 * \brief Levy measure m(s, dz) on (0, inf): finitely many atoms plus an
 * optional power-law density.
 */
class JumpKernel {
 public:
  JumpKernel() = default;
  explicit JumpKernel(std::vector<KernelAtom> atoms,
                      std::optional<PowerLaw> power_law = std::nullopt);

  static JumpKernel atomic(std::vector<KernelAtom> atoms) {
    return JumpKernel(std::move(atoms));
  }
  static JumpKernel power_law(PowerLaw p) { return JumpKernel({}, p); }

  const std::vector<KernelAtom>& atoms() const { return atoms_; }
  const std::optional<PowerLaw>& density() const { return power_law_; }
  bool empty() const;

  //! Same kernel with every weight multiplied by f.
  JumpKernel scaled(double f) const;

  //! Restriction to (a, b].
  JumpKernel restricted(double a, double b) const;

  //! m((a, b]).
  double mass(double a, double b = kInf) const;

  //! Integral of z^p m(dz) over (a, b].
  double moment(double p, double a, double b) const;

  //! Integral of (1 ^ z^2) m(dz).
  double truncated_second_moment() const;

  //! Integral of K1(lambda, z) m(dz).
  Estimate k1_integral(double lambda) const;

  //! Integral of K(lambda, z) m(dz) over (0, cutoff].
  Estimate k_integral(double lambda, double cutoff) const;

  //! Integral of (e^{-lambda z} - 1) m(dz) over (lower, inf).
  Estimate exp_integral(double lambda, double lower) const;

  //! Integral of h(lambda z) m(dz) over (a, b].
  Estimate integrate(const ExpPoly& h, double lambda, double a, double b) const;

 private:
  std::vector<KernelAtom> atoms_;
  std::optional<PowerLaw> power_law_;
};

}  // namespace cbve
