// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbve/cumulant.hpp"
#include "cbve/environment.hpp"
#include "cbve/pgf.hpp"

namespace cbve {

enum class GenerationKind { Identity, Cell, Atom };

const char* to_string(GenerationKind kind);

//! Non-identity generation of the level-k chain.
struct Generation {
  std::int64_t index = 0;
  GenerationKind kind = GenerationKind::Identity;
  double start = 0.0;  //!< cell left end, or atom time
  double end = 0.0;    //!< cell right end, or atom time
  Pgf pgf;
};

//! Builder event: a pgf replaced by the identity, or a clamped constant.
struct BuildEvent {
  std::int64_t generation = -1;
  double time = 0.0;
  std::string reason;
};

/*!
 * \brief Level-k Galton-Watson chain in varying environment.
 *
 * Generation i carries pgf g_{k,i}; identity generations are not stored.
 * Immutable after construction.
 */
class DiscreteModel {
 public:
  //! Chain g_0, ..., g_{n-1} with no time scale attached.
  static DiscreteModel from_chain(int k, std::vector<Pgf> pgfs);

  int level() const { return k_; }
  double theta() const { return theta_; }
  double c0() const { return c0_; }
  double beta() const { return clock_.beta(); }
  double cutoff() const { return ck_; }
  const DiscreteTimeScale& clock() const { return clock_; }
  std::int64_t generations() const { return count_; }

  const Pgf& pgf(std::int64_t i) const;
  GenerationKind kind(std::int64_t i) const;
  const std::vector<Generation>& active() const { return active_; }
  const std::vector<BuildEvent>& downgrades() const { return downgrades_; }
  const std::vector<BuildEvent>& notes() const { return notes_; }

  //! Non-identity generations with index in [m, n).
  std::pair<std::size_t, std::size_t> active_range(std::int64_t m,
                                                   std::int64_t n) const;

  //! 1 - g_{m,n}(1 - x)
  double compose_deficit(std::int64_t m, std::int64_t n, double x) const;
  //! g_{m,n}(1 - x) - (1 - x)
  double compose_excess(std::int64_t m, std::int64_t n, double x) const;
  //! g_{m,n}(u) = g_m(g_{m+1}(...g_{n-1}(u)))
  double compose(std::int64_t m, std::int64_t n, double u) const;

 private:
  friend DiscreteModel build_discrete_model(const EnvironmentSpec&, int, double);

  int k_ = 1;
  double theta_ = 0.5;
  double c0_ = 0.0;
  double ck_ = 0.0;
  std::int64_t count_ = 0;
  DiscreteTimeScale clock_;
  std::vector<Generation> active_;
  std::vector<std::int32_t> slot_;
  std::vector<BuildEvent> downgrades_;
  std::vector<BuildEvent> notes_;
};

//! Auxiliary quadratic pgf of a cell: 2(q + B) + (1 - 4q - 2B) u + 2q u^2,
//! with B the integrated truncated drift.
Pgf auxiliary_quadratic_pgf(double q, double drift);

//! Explicit level-k chain: cell pgfs on S_k, atom pgfs after J_k^+ jumps.
DiscreteModel build_discrete_model(const EnvironmentSpec& env, int k,
                                   double theta = 0.5);

//! -k log g_{m,n}(e^{-lambda/k})
double chain_cumulant(const DiscreteModel& model, std::int64_t m,
                      std::int64_t n, double lambda);

//! v_k(r, t; lambda) = -k log g_{gamma_k(r), gamma_k(t)}(e^{-lambda/k})
double discrete_cumulant(const DiscreteModel& model, double r, double t,
                         double lambda);

//! v_k(r, t; lambda) for every r in rs (any order), sharing one backward pass.
std::vector<double> discrete_cumulant_path(const DiscreteModel& model, double t,
                                           double lambda,
                                           const std::vector<double>& rs);

//---------------------------------------------------------------------------//
// Diagnostic functionals
//---------------------------------------------------------------------------//

enum class PhiRoute { Definition, Relation };

//! Phi^{(1)} uses g_{gamma_k(s-)}, Phi^{(2)} uses g_{gamma_k(s-)+1, gamma_k(s)}.
double big_phi(const DiscreteModel& model, double s, double lambda, int which);

//! phi^{(i)}_k(s, lambda) by its definition or through Phi^{(i)}.
double small_phi(const DiscreteModel& model, double s, double lambda, int which,
                 PhiRoute route = PhiRoute::Definition);

//! h_k(z) = k (1 - e^{-z/k})
double h_k(int k, double z);

struct ResidualRow {
  double s = 0.0;
  double sup_i1 = 0.0;
  double sup_i2 = 0.0;
  double sup_total = 0.0;  //!< sup over lambda of |I1| + |I2|
};

struct ResidualTable {
  std::vector<ResidualRow> rows;
  double sum_i1 = 0.0;
  double sum_i2 = 0.0;
  double sum_total = 0.0;
};

//! I_{k,s,1}, I_{k,s,2} for s in J_k(r, t], suprema over the lambda grid.
ResidualTable condition_a_residuals(const DiscreteModel& model,
                                    const EnvironmentSpec& env, double r,
                                    double t, const std::vector<double>& lambdas);

//! Analytic bound F_k(t) from the construction, split by term.
struct ResidualBound {
  double large_jumps = 0.0;
  double quadratic = 0.0;
  double atom_drift = 0.0;
  double small_jumps = 0.0;
  double small_atoms = 0.0;
  double total() const {
    return large_jumps + quadratic + atom_drift + small_jumps + small_atoms;
  }
};

ResidualBound condition_a_bound(const DiscreteModel& model,
                                const EnvironmentSpec& env, double t, double cap);

//---------------------------------------------------------------------------//
// Convergence sweep
//---------------------------------------------------------------------------//

struct ConvergenceOptions {
  double horizon = 1.0;
  double a = 0.5;
  double b = 2.0;
  int lambda_points = 7;
  int time_points = 11;
  double theta = 0.5;
  double eta = 2.0;
  double tol = kDefaultTolerance;
  int residual_lambda_points = 9;
};

struct ConvergenceRow {
  int k = 0;
  double beta = 0.0;
  std::int64_t generations = 0;
  double sup_error = 0.0;      //!< sup |v_k - v|
  double sup_d_error = 0.0;    //!< sup |e^{-v_k} - e^{-v}|
  std::int64_t corridor_violations = 0;
  std::int64_t corridor_checked = 0;
  double min_vk = 0.0;
  double max_vk = 0.0;
  double residual_sum = 0.0;
  double residual_bound = 0.0;
  std::size_t downgrades = 0;
};

struct ConvergenceReport {
  ConvergenceOptions options;
  std::vector<double> lambdas;
  std::vector<double> times;
  EnvelopeConstants envelope;
  bool envelope_ok = true;
  std::string envelope_error;
  std::vector<ConvergenceRow> rows;
};

std::vector<double> linear_grid(double a, double b, int n);

//! One row of the sweep, for a prebuilt model.
ConvergenceRow convergence_row(const EnvironmentSpec& env,
                               const DiscreteModel& model,
                               const ConvergenceReport& frame,
                               const std::vector<CumulantSolution>& exact);

//! Exact v on the (r, t, lambda) grid of the frame, one solution per t.
std::vector<CumulantSolution> exact_grid(const EnvironmentSpec& env,
                                         const ConvergenceReport& frame);

//! Grids and envelope constants with no rows.
ConvergenceReport convergence_frame(const EnvironmentSpec& env,
                                    const ConvergenceOptions& options);

ConvergenceReport convergence_report(const EnvironmentSpec& env,
                                     const std::vector<int>& ks,
                                     const ConvergenceOptions& options);

}  // namespace cbve
