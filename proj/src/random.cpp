#include "addivortes/random.hpp"

#include <cmath>

namespace addivortes {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Random::Random(std::uint64_t seed) : engine_(seed) {}

double Random::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Random::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Random::normal() { return normal_(engine_); }

double Random::exponential(double rate) { return -std::log(uniform_open()) / rate; }

std::size_t Random::index(std::size_t n) {
  // Lemire's multiply-shift with rejection; unbiased for any n.
  const std::uint64_t range = n;
  std::uint64_t x = engine_();
  __uint128_t product = static_cast<__uint128_t>(x) * range;
  std::uint64_t low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      x = engine_();
      product = static_cast<__uint128_t>(x) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

}  // namespace addivortes
