/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_RNG_HPP
#define NLRM_RNG_HPP

#include <cstdint>
#include <random>

namespace nlrm
{

/**
 * std::mt19937_64 with fixed conversions to doubles and bounded integers.
 * The engine's output sequence is fixed by the standard, but the standard
 * distributions are implementation-defined, so they are not used: every
 * random draw in the library goes through this class to stay reproducible
 * across platforms.
 */
class Rng
{
public:
  using result_type = std::mt19937_64::result_type;

  static constexpr const char* name = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection (n > 0).
  std::uint64_t below(std::uint64_t n)
  {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r;
    do
      r = engine_();
    while (r >= limit);
    return r % n;
  }

private:
  std::mt19937_64 engine_;
};

/// Independent seed for sub-stream `stream` of a run seeded with `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(base),
                    static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

} // namespace nlrm

#endif
