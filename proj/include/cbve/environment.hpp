// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbve/kernel.hpp"

namespace cbve {

//! Coefficients (b1, c, m) of the branching mechanism at one time.
struct Coefficients {
  double b1 = 0.0;
  double c = 0.0;
  JumpKernel kernel;

  //! |b1| + c + int (1 ^ z^2) m(dz)
  double size() const;
};

//! Absolutely continuous part of gamma on [start, end).
struct Piece {
  double start = 0.0;
  double end = 0.0;
  double density = 0.0;
  Coefficients coef;
};

//! Atom of gamma at time (0, T].
struct Atom {
  double time = 0.0;
  double mass = 0.0;
  Coefficients coef;
};

//! Portion of the gamma measure with constant coefficients.
struct Segment {
  double start = 0.0;
  double end = 0.0;
  double mass = 0.0;  //!< gamma mass of the segment
  const Coefficients* coef = nullptr;
  bool atom = false;

  double density() const { return atom ? 0.0 : mass / (end - start); }
};

//! Endpoint convention for gamma-integrals.
enum class Interval { Open, LeftOpen, Closed };

/*!
 * \brief Time scale gamma with piecewise constant coefficients on [0, T].
 *
 * Immutable after construction. Pieces must be ordered and disjoint; gaps
 * carry no gamma mass. Atoms are strictly ordered in (0, T].
 */
class EnvironmentSpec {
 public:
  EnvironmentSpec() = default;
  EnvironmentSpec(double horizon, std::vector<Piece> pieces,
                  std::vector<Atom> atoms);

  double horizon() const { return horizon_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  //! gamma(t)
  double gamma(double t) const;
  //! gamma(t-)
  double gamma_left(double t) const;
  //! inf{s >= 0 : gamma(s) >= y - tol}, infinite if never reached
  double gamma_inverse(double y, double tol = 0.0) const;

  //! Atom at exactly time t, or null.
  const Atom* atom_at(double t) const;
  //! Coefficients in force at time s (the atom's if s is an atom time).
  const Coefficients& coefficients(double s) const;

  //! Constant-coefficient pieces of gamma restricted to the interval, in
  //! time order.
  std::vector<Segment> segments(double a, double b, Interval kind) const;

  //! Gamma mass of the interval.
  double measure(double a, double b, Interval kind) const;

 private:
  double horizon_ = 0.0;
  std::vector<Piece> pieces_;
  std::vector<Atom> atoms_;

  struct Event {
    double start;
    double end;
    double mass;
    bool atom;
    std::size_t index;
  };
  std::vector<Event> timeline_;

  Segment segment(const Event& e, double lo, double hi) const;
};

//---------------------------------------------------------------------------//
// Free-form parameters
//---------------------------------------------------------------------------//

//! Densities of (b1~, c~, m~) on [start, end); m~(ds,dz) = m_density ds kernel(dz).
struct RawPiece {
  double start = 0.0;
  double end = 0.0;
  double b1_density = 0.0;
  double c_density = 0.0;
  double m_density = 0.0;
  JumpKernel kernel;
};

//! Atom of (b1~, m~) at time; c~ has no atoms.
struct RawAtom {
  double time = 0.0;
  double b1_mass = 0.0;
  double m_mass = 0.0;
  JumpKernel kernel;
};

struct RawTriplet {
  double horizon = 0.0;
  std::vector<RawPiece> pieces;
  std::vector<RawAtom> atoms;
};

//! gamma = |b1~| + c~ + m~_1 with coefficients as density ratios.
EnvironmentSpec canonicalize(const RawTriplet& raw);

//! Measures b1 gamma, c gamma, m gamma written as a raw triplet.
RawTriplet reconstruct(const EnvironmentSpec& env);

//---------------------------------------------------------------------------//
// Admissibility
//---------------------------------------------------------------------------//

struct Violation {
  std::string condition;  //!< "1'", "2'" or "3'"
  std::string location;   //!< "piece[i]" or "atom[i]@t"
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_admissible(const EnvironmentSpec& env,
                                     double eta_t = 2.0);

//! sup over pieces and atoms of |b1| + c + int (1 ^ z^2) m.
double compute_c0(const EnvironmentSpec& env);

//! delta(s) = [b1 + int_(0,1] z m] mass at an atom.
double atom_delta(const Atom& atom);

//---------------------------------------------------------------------------//
// Discrete clock
//---------------------------------------------------------------------------//

//! Snapping tolerance for gamma values near multiples of 1/beta.
inline constexpr double kSnapTolerance = 1e-12;

/*!
 * \brief Clock gamma_k(t) = floor(beta gamma(t)) with its right-continuous
 * inverse.
 *
 * All index sets derive from the inverse table so that floor decisions are
 * made once.
 */
class DiscreteTimeScale {
 public:
  DiscreteTimeScale() = default;
  DiscreteTimeScale(const EnvironmentSpec& env, double beta);

  double beta() const { return beta_; }
  //! gamma_k(T)
  std::int64_t total() const { return static_cast<std::int64_t>(inverse_.size()) - 1; }

  //! gamma_k(t)
  std::int64_t operator()(double t) const;
  //! gamma_k(t-)
  std::int64_t left_limit(double t) const;
  //! gamma_k^{-1}(i), infinite beyond total()
  double inverse(std::int64_t i) const;

  //! Some s in [0, T] has gamma_k(s) = j.
  bool attained(std::int64_t j) const;
  //! i in S_k(0, T)
  bool in_s(std::int64_t i) const;

  //! J_k(r, t]: times in (r, t] where the clock moves.
  std::vector<double> jump_times(double r, double t) const;
  //! J_k^+(r, t]: times in (r, t] where the clock moves by more than one.
  std::vector<double> big_jump_times(double r, double t) const;

 private:
  double beta_ = 0.0;
  std::vector<double> inverse_;
};

//! Level-k clock with beta_k = 4 C0 (k + 1).
DiscreteTimeScale discretize_time(const EnvironmentSpec& env, int k, double c0);

}  // namespace cbve
