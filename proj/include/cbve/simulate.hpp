// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cbve/discrete.hpp"
#include "cbve/pgf.hpp"
#include "cbve/rng.hpp"

namespace cbve {

//! Explosion guard on the population size.
inline constexpr std::int64_t kPopulationCap = 1'000'000'000'000;

//---------------------------------------------------------------------------//
// Offspring laws
//---------------------------------------------------------------------------//

struct OffspringPmf {
  std::vector<double> p;
  double tail = 0.0;      //!< 1 - sum p
  double mean = 0.0;      //!< sum n p_n
  double pgf_mean = 0.0;  //!< g'(1)

  std::size_t truncation() const { return p.empty() ? 0 : p.size() - 1; }
};

//! Coefficients p_0..p_N of g with 1 - sum p <= tail_tol.
OffspringPmf pgf_pmf(const Pgf& g, double tail_tol = 1e-12);

/*!
 * \brief Offspring law of one pgf as a mixture of simple components.
 *
 * Point masses at 0, 1, 2; Poisson laws; Poisson laws conditioned on at
 * least two; and power-law mixtures of conditioned Poisson laws. Poisson
 * components are kept whole where the point masses allow it, since a sum
 * of Poisson draws is one Poisson draw.
 */
struct SamplingPlan {
  struct Component {
    double weight = 0.0;
    double rate = 0.0;
  };
  struct Mixture {
    double weight = 0.0;
    PowerLaw kernel;
    double rate = 0.0;
  };

  double point[3] = {0.0, 1.0, 0.0};
  std::vector<Component> poisson;
  std::vector<Component> truncated;
  std::vector<Mixture> mixtures;
  double branching_weight = 0.0;  //!< total weight off the point mass at 1

  static SamplingPlan from(const Pgf& g);
};

//! Total offspring of z individuals.
std::int64_t sample_offspring_total(const SamplingPlan& plan, std::int64_t z,
                                    RandomStream& rng);

//---------------------------------------------------------------------------//
// Trajectories
//---------------------------------------------------------------------------//

//! Plans for every non-identity generation of a model.
class Simulator {
 public:
  explicit Simulator(const DiscreteModel& model);

  const DiscreteModel& model() const { return *model_; }

  //! Population after generations [m, n); sets exploded at the cap.
  std::int64_t advance(std::int64_t z, std::int64_t m, std::int64_t n,
                       std::uint64_t seed, std::uint32_t replicate,
                       bool& exploded) const;

 private:
  const DiscreteModel* model_;
  std::vector<SamplingPlan> plans_;
};

struct Trajectory {
  int k = 0;
  std::int64_t z0 = 0;
  std::vector<std::int64_t> z;  //!< Z_k(0..gamma_k(T)), truncated at explosion
  std::vector<double> times;
  std::vector<double> x;        //!< Z_k(gamma_k(s)) / k on the time grid
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;
  bool exploded = false;
};

Trajectory simulate_trajectory(const DiscreteModel& model, std::int64_t z0,
                               const std::vector<double>& time_grid,
                               std::uint64_t seed, std::uint32_t replicate = 0);

//---------------------------------------------------------------------------//
// Monte Carlo Laplace check
//---------------------------------------------------------------------------//

//! Runs body(i) for i in [0, n); any order, any concurrency.
using ParallelFor =
    std::function<void(std::size_t, const std::function<void(std::size_t)>&)>;

struct McCell {
  double t = 0.0;
  double lambda = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double exact_vk = 0.0;      //!< v_k(0, t; lambda)
  double target = 0.0;        //!< e^{-x0 v_k}
  double z = 0.0;
  double limit_v = 0.0;       //!< v(0, t; lambda), NaN if not requested
  double limit_gap = 0.0;     //!< |estimate - e^{-x0 v}|
};

struct McReport {
  int k = 0;
  double x0 = 0.0;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  std::int64_t exploded = 0;
  std::vector<McCell> cells;
};

struct McOptions {
  double x0 = 1.0;
  std::vector<double> times;
  std::vector<double> lambdas;
  std::int64_t replicates = 100'000;
  std::uint64_t seed = 1;
  //! Adds the limit comparison when set.
  const EnvironmentSpec* env = nullptr;
  double tol = 1e-10;
};

inline constexpr std::size_t kMcBlock = 1024;

McReport mc_laplace_check(const DiscreteModel& model, const McOptions& options,
                          const ParallelFor& parallel = {});

}  // namespace cbve
