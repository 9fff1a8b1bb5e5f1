// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace cbve {

//---------------------------------------------------------------------------//
/*!
 * \brief Philox4x32-10 counter-based generator.
 *
 * Stateless bijection from (counter, key) to 128 random bits.
 */
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

//---------------------------------------------------------------------------//
/*!
 * \brief Stream keyed by (seed, replicate, generation, purpose).
 *
 * Draws depend only on the key and the draw position, so replicates can be
 * simulated in any order or in parallel.
 */
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t replicate,
               std::uint32_t generation, std::uint32_t purpose = 0);

  std::uint64_t next_u64();
  //! Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  Philox4x32::Counter block_{};
  int pos_ = 4;
};

}  // namespace cbve
