#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace certicd {

// Generator identifier recorded in model provenance. The stream is
// mt19937_64 with uniform doubles taken as the top 53 bits of each draw,
// so results are reproducible by any conforming implementation.
inline constexpr std::string_view kGeneratorId = "mt19937_64-u53/v1";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  return fnv1a64(s.data(), s.size(), h);
}

// Derives an independent stream seed from a base seed and a domain tag
// (e.g. evaluation streams are hash(train_seed, "eval")).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = fnv1a64(&base, sizeof(base));
  return fnv1a64(tag, h);
}

}  // namespace certicd
