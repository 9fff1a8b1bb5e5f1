// SPDX-License-Identifier: Apache-2.0
#include "cbve/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cbve/cumulant.hpp"
#include "cbve/error.hpp"
#include "cbve/sampling.hpp"

namespace cbve {
namespace {

constexpr double kNegativeFloor = -1e-12;

double checked_weight(double w, const char* what) {
  if (w < kNegativeFloor) {
    std::ostringstream os;
    os << what << " = " << w << " is negative";
    throw CorruptPgf("simulate", "pgf_pmf", os.str());
  }
  return std::max(w, 0.0);
}

//! Running mean and sum of squared deviations.
struct Welford {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    double total = n + o.n;
    double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
};

}  // namespace

//---------------------------------------------------------------------------//
OffspringPmf pgf_pmf(const Pgf& g, double tail_tol) {
  double max_rate = 0.0;
  for (const auto& t : g.poisson_terms()) max_rate = std::max(max_rate, t.rate);
  for (const auto& t : g.power_law_terms()) {
    max_rate = std::max(max_rate, t.rate * t.kernel.zmax);
  }
  constexpr double kMaxTerms = 1e6;
  double n_min = std::min(kMaxTerms, max_rate + 15.0 * std::sqrt(max_rate) + 20.0);

  OffspringPmf pmf;
  double sum = 0.0;
  double mean = 0.0;
  for (int n = 0;; ++n) {
    double p = g.coefficient(n);
    if (p < kNegativeFloor) {
      std::ostringstream os;
      os << "coefficient " << n << " = " << p << " is negative";
      throw CorruptPgf("simulate", "pgf_pmf", os.str());
    }
    pmf.p.push_back(p);
    sum += p;
    mean += n * p;
    if (n >= 2 && n >= n_min && 1.0 - sum <= tail_tol) break;
    if (n >= kMaxTerms) break;
  }
  pmf.tail = 1.0 - sum;
  pmf.mean = mean;
  pmf.pgf_mean = g.mean();
  return pmf;
}

SamplingPlan SamplingPlan::from(const Pgf& g) {
  SamplingPlan plan;
  double r0 = checked_weight(g.at_zero(), "g(0)");
  double r1 = checked_weight(g.slope_at_zero(), "g'(0)");
  double r2 = checked_weight(g.e2(), "quadratic weight");

  std::vector<PoissonTerm> terms = g.poisson_terms();
  std::stable_sort(terms.begin(), terms.end(),
                   [](const PoissonTerm& a, const PoissonTerm& b) { return a.rate > b.rate; });
  const ExpPoly tail = ExpPoly::tail_mass();
  for (const auto& t : terms) {
    if (t.weight <= 0.0 || t.rate <= 0.0) continue;
    double e = std::exp(-t.rate);
    double p0 = t.weight * e;
    double p1 = t.weight * t.rate * e;
    double f = 1.0;
    if (p0 > 0.0) f = std::min(f, r0 / p0);
    if (p1 > 0.0) f = std::min(f, r1 / p1);
    f = std::max(f, 0.0);
    r0 = std::max(0.0, r0 - f * p0);
    r1 = std::max(0.0, r1 - f * p1);
    if (f > 0.0) plan.poisson.push_back({f * t.weight, t.rate});
    if (f < 1.0) plan.truncated.push_back({(1.0 - f) * t.weight * tail(t.rate), t.rate});
  }
  for (const auto& t : g.power_law_terms()) {
    double w = t.weight * t.kernel.integrate(tail, t.rate).value;
    if (w > 0.0) plan.mixtures.push_back({w, t.kernel, t.rate});
  }
  plan.point[0] = r0;
  plan.point[1] = r1;
  plan.point[2] = r2;
  double bw = r0 + r2;
  for (const auto& c : plan.poisson) bw += c.weight;
  for (const auto& c : plan.truncated) bw += c.weight;
  for (const auto& c : plan.mixtures) bw += c.weight;
  plan.branching_weight = bw;
  return plan;
}

std::int64_t sample_offspring_total(const SamplingPlan& plan, std::int64_t z,
                                    RandomStream& rng) {
  if (z <= 0) return 0;
  std::int64_t remaining = sample_binomial(rng, z, std::min(1.0, plan.branching_weight));
  std::int64_t total = z - remaining;
  double weight_left = plan.branching_weight;
  std::size_t categories = 2 + plan.poisson.size() + plan.truncated.size() +
                           plan.mixtures.size();
  // Conditional binomial split; the last category takes the remainder.
  auto take = [&](double w, std::size_t index) -> std::int64_t {
    if (remaining == 0) return 0;
    std::int64_t n;
    if (index + 1 == categories || weight_left <= w) {
      n = remaining;
    } else {
      n = sample_binomial(rng, remaining, w / weight_left);
    }
    remaining -= n;
    weight_left -= w;
    return n;
  };
  std::size_t index = 0;
  take(plan.point[0], index++);
  total += 2 * take(plan.point[2], index++);
  double rate_sum = 0.0;
  for (const auto& c : plan.poisson) {
    rate_sum += static_cast<double>(take(c.weight, index++)) * c.rate;
  }
  for (const auto& c : plan.truncated) {
    std::int64_t n = take(c.weight, index++);
    for (std::int64_t i = 0; i < n; ++i) total += sample_poisson_at_least_two(rng, c.rate);
  }
  for (const auto& c : plan.mixtures) {
    std::int64_t n = take(c.weight, index++);
    for (std::int64_t i = 0; i < n; ++i) {
      double y = sample_power_law_rate(rng, c.kernel, c.rate);
      total += sample_poisson_at_least_two(rng, y);
    }
  }
  if (rate_sum > 0.0) total += sample_poisson(rng, rate_sum);
  return total;
}

//---------------------------------------------------------------------------//
Simulator::Simulator(const DiscreteModel& model) : model_(&model) {
  plans_.reserve(model.active().size());
  for (const auto& gen : model.active()) plans_.push_back(SamplingPlan::from(gen.pgf));
}

std::int64_t Simulator::advance(std::int64_t z, std::int64_t m, std::int64_t n,
                                std::uint64_t seed, std::uint32_t replicate,
                                bool& exploded) const {
  auto [lo, hi] = model_->active_range(m, n);
  const auto& active = model_->active();
  for (std::size_t j = lo; j < hi && z > 0; ++j) {
    RandomStream rng(seed, replicate, static_cast<std::uint32_t>(active[j].index));
    z = sample_offspring_total(plans_[j], z, rng);
    if (z > kPopulationCap) {
      exploded = true;
      return z;
    }
  }
  return z;
}

Trajectory simulate_trajectory(const DiscreteModel& model, std::int64_t z0,
                               const std::vector<double>& time_grid,
                               std::uint64_t seed, std::uint32_t replicate) {
  if (z0 < 0) throw InvalidArgument("simulate", "simulate_trajectory", "z0 must be >= 0");
  Simulator sim(model);
  Trajectory tr;
  tr.k = model.level();
  tr.z0 = z0;
  tr.seed = seed;
  tr.replicate = replicate;
  tr.z.push_back(z0);
  std::int64_t z = z0;
  for (std::int64_t i = 0; i < model.generations(); ++i) {
    if (model.kind(i) != GenerationKind::Identity) {
      z = sim.advance(z, i, i + 1, seed, replicate, tr.exploded);
    }
    tr.z.push_back(z);
    if (tr.exploded) break;
  }
  const auto& clock = model.clock();
  for (double s : time_grid) {
    if (!(s >= 0.0)) throw InvalidArgument("simulate", "simulate_trajectory", "negative time");
    auto g = static_cast<std::size_t>(clock(s));
    tr.times.push_back(s);
    double value = g < tr.z.size() ? static_cast<double>(tr.z[g]) / tr.k
                                   : std::numeric_limits<double>::infinity();
    tr.x.push_back(value);
  }
  return tr;
}

//---------------------------------------------------------------------------//
McReport mc_laplace_check(const DiscreteModel& model, const McOptions& options,
                          const ParallelFor& parallel) {
  int k = model.level();
  double kx = k * options.x0;
  auto z0 = static_cast<std::int64_t>(std::llround(kx));
  if (std::abs(kx - static_cast<double>(z0)) > 1e-9 || z0 < 0) {
    throw InvalidArgument("simulate", "mc_laplace_check", "k x0 must be a nonnegative integer");
  }
  if (options.replicates < 1) {
    throw InvalidArgument("simulate", "mc_laplace_check", "need at least one replicate");
  }
  std::vector<double> times = options.times;
  std::sort(times.begin(), times.end());
  const auto& lambdas = options.lambdas;
  std::vector<std::int64_t> gens;
  for (double t : times) gens.push_back(model.clock()(t));

  std::size_t cells = times.size() * lambdas.size();
  auto nblocks = static_cast<std::size_t>(
      (options.replicates + static_cast<std::int64_t>(kMcBlock) - 1) /
      static_cast<std::int64_t>(kMcBlock));
  std::vector<std::vector<Welford>> blocks(nblocks, std::vector<Welford>(cells));
  std::vector<std::int64_t> exploded(nblocks, 0);
  Simulator sim(model);

  auto body = [&](std::size_t b) {
    auto& stats = blocks[b];
    std::int64_t first = static_cast<std::int64_t>(b * kMcBlock);
    std::int64_t last = std::min<std::int64_t>(first + kMcBlock, options.replicates);
    for (std::int64_t rep = first; rep < last; ++rep) {
      std::int64_t z = z0;
      std::int64_t at = 0;
      bool boom = false;
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        if (!boom) z = sim.advance(z, at, gens[ti], options.seed,
                                   static_cast<std::uint32_t>(rep), boom);
        at = gens[ti];
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
          double value = boom ? 0.0 : std::exp(-lambdas[li] * static_cast<double>(z) / k);
          stats[ti * lambdas.size() + li].add(value);
        }
      }
      if (boom) ++exploded[b];
    }
  };
  if (parallel) {
    parallel(nblocks, body);
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) body(b);
  }

  McReport report;
  report.k = k;
  report.x0 = options.x0;
  report.replicates = options.replicates;
  report.seed = options.seed;
  report.exploded = std::accumulate(exploded.begin(), exploded.end(), std::int64_t{0});
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      Welford total;
      for (const auto& stats : blocks) total.merge(stats[ti * lambdas.size() + li]);
      McCell cell;
      cell.t = times[ti];
      cell.lambda = lambdas[li];
      cell.estimate = total.mean;
      cell.stderr_ = total.n > 1.0 ? std::sqrt(total.m2 / (total.n - 1.0) / total.n) : 0.0;
      cell.exact_vk = chain_cumulant(model, 0, gens[ti], cell.lambda);
      cell.target = std::exp(-options.x0 * cell.exact_vk);
      double diff = cell.estimate - cell.target;
      if (cell.stderr_ > 0.0) {
        cell.z = diff / cell.stderr_;
      } else {
        cell.z = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(kInf, diff);
      }
      if (options.env) {
        cell.limit_v = solve_backward(*options.env, 0.0, cell.t, cell.lambda, options.tol).value;
        cell.limit_gap = std::abs(cell.estimate - std::exp(-options.x0 * cell.limit_v));
      } else {
        cell.limit_v = std::numeric_limits<double>::quiet_NaN();
        cell.limit_gap = std::numeric_limits<double>::quiet_NaN();
      }
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace cbve
