#include <doctest.h>

#include <cmath>
#include <numbers>

#include "addivortes/error.hpp"
#include "addivortes/probit.hpp"
#include "oracles.hpp"

using namespace addivortes;

namespace {

// E[X | X > 0] for X ~ N(mean, 1), computed in the log domain.
double positive_mean(double mean) {
  const double log_phi = -0.5 * mean * mean - 0.5 * std::log(2.0 * std::numbers::pi);
  const double log_tail = std::log(0.5 * std::erfc(-mean / std::sqrt(2.0)));
  return mean + std::exp(log_phi - log_tail);
}

double truncated_cdf(double v, double mean, bool positive) {
  // CDF of N(mean, 1) restricted to one half-line
  const double phi_v = 0.5 * std::erfc(-(v - mean) / std::sqrt(2.0));
  const double phi_0 = 0.5 * std::erfc(mean / std::sqrt(2.0));
  if (positive) {
    const double tail = 0.5 * std::erfc(-mean / std::sqrt(2.0));
    return v <= 0.0 ? 0.0 : (phi_v - phi_0) / tail;
  }
  return v >= 0.0 ? 1.0 : phi_v / phi_0;
}

}  // namespace

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(3.0) == doctest::Approx(0.998650101968).epsilon(1e-11));
  CHECK(normal_sf(8.0) == doctest::Approx(6.22096057427e-16).epsilon(1e-9));
  for (double p : {1e-10, 0.01, 0.3, 0.5, 0.77, 0.999999}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK_THROWS_AS(normal_quantile(1.5), ConfigError);
}

TEST_CASE("truncated draws stay on their side") {
  Random rng(1);
  for (double mean : {-30.0, -5.0, 0.0, 3.0, 30.0}) {
    for (int i = 0; i < 20000; ++i) {
      const double pos = sample_truncated_normal(mean, true, rng);
      const double neg = sample_truncated_normal(mean, false, rng);
      REQUIRE(pos > 0.0);
      REQUIRE(neg <= 0.0);
      REQUIRE(std::isfinite(pos));
      REQUIRE(std::isfinite(neg));
    }
  }
}

TEST_CASE("truncated normal means") {
  Random rng(2);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += sample_truncated_normal(0.0, true, rng);
  CHECK(std::abs(sum / n - std::sqrt(2.0 / std::numbers::pi)) < 0.01 * std::sqrt(2.0 / std::numbers::pi));

  double tail = 0.0;
  const int m = 100000;
  for (int i = 0; i < m; ++i) tail += sample_truncated_normal(-8.0, true, rng);
  CHECK(std::abs(tail / m - positive_mean(-8.0)) < 0.02 * positive_mean(-8.0));
}

TEST_CASE("truncated normal passes a KS test") {
  Random rng(3);
  const std::size_t n = 100000;
  for (double mean : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
    for (bool positive : {true, false}) {
      std::vector<double> draws(n);
      for (auto& d : draws) d = sample_truncated_normal(mean, positive, rng);
      const double stat = oracle::ks_statistic(draws, [&](double v) { return truncated_cdf(v, mean, positive); });
      CAPTURE(mean);
      CAPTURE(positive);
      CHECK(stat < oracle::ks_critical_1e3(n));
    }
  }
}

TEST_CASE("update_latents respects signs and matches the half-normal mean") {
  BinaryResponse y;
  y.y = {0, 1, 0, 1};
  LatentState state;
  state.fitted = {0.0, 0.0, 2.0, -2.0};
  Random rng(4);
  update_latents(state, y, rng);
  CHECK(sign_consistent(state, y));

  BinaryResponse y0;
  y0.y.assign(1000, 0);
  LatentState zero;
  zero.fitted.assign(1000, 0.0);
  double sum = 0.0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    update_latents(zero, y0, rng);
    for (double z : zero.z) sum += z;
  }
  const double mean = sum / (1000.0 * reps);
  CHECK(std::abs(mean + std::sqrt(2.0 / std::numbers::pi)) < 0.01 * std::sqrt(2.0 / std::numbers::pi));
}

TEST_CASE("balanced labels around a zero fit average to zero") {
  BinaryResponse y;
  for (int i = 0; i < 2000; ++i) y.y.push_back(static_cast<std::uint8_t>(i % 2));
  LatentState state;
  state.fitted.assign(2000, 0.0);
  Random rng(5);
  update_latents(state, y, rng);
  double sum = 0.0, sq = 0.0;
  for (double z : state.z) {
    sum += z;
    sq += z * z;
  }
  const double n = 2000.0;
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 3.0 * sd / std::sqrt(n));
}

TEST_CASE("offset shifts the latent mean") {
  BinaryResponse y;
  y.y.assign(20000, 1);
  LatentState state;
  state.fitted.assign(20000, 0.0);
  Random rng(6);
  update_latents(state, y, rng, 1.0);
  double sum = 0.0;
  for (double z : state.z) sum += z;
  CHECK(std::abs(sum / 20000.0 - positive_mean(1.0)) < 0.01);
}

TEST_CASE("latent draws are reproducible") {
  BinaryResponse y;
  y.y = {1, 0, 1, 1, 0};
  LatentState a;
  a.fitted = {0.3, -1.0, 2.0, 0.0, 4.0};
  LatentState b = a;
  Random r1(7), r2(7);
  update_latents(a, y, r1);
  update_latents(b, y, r2);
  CHECK(a.z == b.z);
}

TEST_CASE("binary response validation") {
  BinaryResponse y;
  y.y = {0, 1, 2};
  CHECK_THROWS_AS(y.validate(), InputError);
  y.y = {1, 1};
  CHECK_FALSE(y.has_both_classes());
  CHECK(y.positives() == 2);
}
