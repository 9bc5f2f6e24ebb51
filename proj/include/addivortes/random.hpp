#ifndef ADDIVORTES_RANDOM_HPP
#define ADDIVORTES_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace addivortes {

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

// Seeded random source. Every stochastic routine takes one of these by
// reference; callers own the streams.
class Random {
 public:
  explicit Random(std::uint64_t seed);

  // [0, 1)
  double uniform();
  // (0, 1)
  double uniform_open();
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double exponential(double rate);
  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace addivortes

#endif
