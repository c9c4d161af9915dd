#pragma once

// Mid-value selection over three single-precision signals: the nearest-to-mean
// rule that loses small values to absorption, and the min/max network.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace specverify::fp {

std::uint32_t bits_of(float f);
float from_bits(std::uint32_t bits);

/// Seven significant digits plus the bit pattern: "2.328307e-10 (0x2F800002)", "2.0 (0x40000000)".
std::string describe(float f);

struct Triple32 {
  float a, b, c;

  /// Throws NonFiniteInput for NaN or infinity.
  Triple32(float a, float b, float c);
  static Triple32 from_bits(std::uint32_t a, std::uint32_t b, std::uint32_t c);

  float operator[](std::size_t i) const { return i == 0 ? a : i == 1 ? b : c; }
};

/// a = 0x67BFFF1A, b = 0x2F800002, c = 0x3FFFF000: b and c vanish when added to a.
Triple32 absorption_triple();

/// ((a + b) + c) in single precision.
float sum32(const Triple32& t);
/// sum32(t) / 3 in single precision.
float mean32(const Triple32& t);

/// Element nearest to mean32; the earliest input wins a tie.
float mid_by_mean(const Triple32& t);

/// max(min(a, b), min(max(a, b), c)).
float mid_by_minmax(const Triple32& t);

/// Triples among `samples` where the two selections differ (by value).
std::vector<Triple32> divergence_search(const std::vector<Triple32>& samples);

/// `count` triples, each element drawn with a uniform biased exponent in
/// [1, 254], a uniform mantissa and a random sign; seeded mt19937_64.
std::vector<Triple32> divergence_search(std::size_t count, std::uint64_t seed);

/// As above with every element uniform in [lo, hi).
std::vector<Triple32> divergence_search_in_range(std::size_t count, std::uint64_t seed, float lo,
                                                 float hi);

/// The sampler behind divergence_search, exposed for reuse in tests.
std::vector<Triple32> stratified_samples(std::size_t count, std::uint64_t seed);

}  // namespace specverify::fp
