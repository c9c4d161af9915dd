#include "specverify/fp_medsel.hpp"

#include <cfloat>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>

#include "specverify/error.hpp"

// Wider intermediates would hide the absorption this module exists to show.
static_assert(FLT_EVAL_METHOD == 0, "single-precision expressions must evaluate in float");

namespace specverify::fp {

std::uint32_t bits_of(float f) {
  std::uint32_t b;
  std::memcpy(&b, &f, sizeof b);
  return b;
}

float from_bits(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

std::string describe(float f) {
  char num[48];
  std::snprintf(num, sizeof num, "%.7g", static_cast<double>(f));
  std::string out = num;
  if (out.find_first_of(".en") == std::string::npos) out += ".0";
  char hex[16];
  std::snprintf(hex, sizeof hex, "0x%08X", static_cast<unsigned>(bits_of(f)));
  return out + " (" + hex + ")";
}

Triple32::Triple32(float a_, float b_, float c_) : a(a_), b(b_), c(c_) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    fail(ErrorCode::NonFiniteInput, "triple holds NaN or infinity");
  }
}

Triple32 Triple32::from_bits(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  return {fp::from_bits(a), fp::from_bits(b), fp::from_bits(c)};
}

Triple32 absorption_triple() { return Triple32::from_bits(0x67BFFF1Au, 0x2F800002u, 0x3FFFF000u); }

float sum32(const Triple32& t) {
  float s = t.a + t.b;
  s = s + t.c;
  return s;
}

float mean32(const Triple32& t) {
  float s = sum32(t);
  return s / 3.0f;
}

float mid_by_mean(const Triple32& t) {
  const float mu = mean32(t);
  std::size_t best = 0;
  float best_dist = std::fabs(t.a - mu);
  for (std::size_t i = 1; i < 3; ++i) {
    float d = std::fabs(t[i] - mu);
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return t[best];
}

float mid_by_minmax(const Triple32& t) {
  float lo = t.a < t.b ? t.a : t.b;
  float hi = t.a < t.b ? t.b : t.a;
  float upper = hi < t.c ? hi : t.c;
  return lo < upper ? upper : lo;
}

std::vector<Triple32> divergence_search(const std::vector<Triple32>& samples) {
  std::vector<Triple32> out;
  for (const auto& t : samples) {
    if (mid_by_mean(t) != mid_by_minmax(t)) out.push_back(t);
  }
  return out;
}

std::vector<Triple32> stratified_samples(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> exponent(1, 254);
  std::uniform_int_distribution<std::uint32_t> mantissa(0, (1u << 23) - 1);
  std::uniform_int_distribution<std::uint32_t> sign(0, 1);
  auto draw = [&] {
    std::uint32_t e = exponent(rng);
    std::uint32_t m = mantissa(rng);
    std::uint32_t s = sign(rng);
    return from_bits((s << 31) | (e << 23) | m);
  };
  std::vector<Triple32> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    float a = draw(), b = draw(), c = draw();
    out.emplace_back(a, b, c);
  }
  return out;
}

std::vector<Triple32> divergence_search(std::size_t count, std::uint64_t seed) {
  require(count > 0, "divergence_search: count must be positive");
  return divergence_search(stratified_samples(count, seed));
}

std::vector<Triple32> divergence_search_in_range(std::size_t count, std::uint64_t seed, float lo,
                                                 float hi) {
  require(count > 0, "divergence_search: count must be positive");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "divergence_search: bad range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> value(lo, hi);
  std::vector<Triple32> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    float a = value(rng), b = value(rng), c = value(rng);
    samples.emplace_back(a, b, c);
  }
  return divergence_search(samples);
}

}  // namespace specverify::fp
