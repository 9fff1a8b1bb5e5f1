// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "cbve/kernel.hpp"
#include "cbve/rng.hpp"

namespace cbve {

//! Binomial(n, p): inversion for small means, BTRS otherwise.
std::int64_t sample_binomial(RandomStream& rng, std::int64_t n, double p);

//! Poisson(mu): inversion for small means, PTRS otherwise.
std::int64_t sample_poisson(RandomStream& rng, double mu);

//! Poisson(mu) conditioned on being at least 2.
std::int64_t sample_poisson_at_least_two(RandomStream& rng, double mu);

//! Mixing variable y = rate z with density proportional to
//! y^{-1-alpha} (1 - e^{-y}(1 + y)) on (rate zmin, rate zmax].
double sample_power_law_rate(RandomStream& rng, const PowerLaw& kernel, double rate);

}  // namespace cbve
