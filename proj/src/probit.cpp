#include "addivortes/probit.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "addivortes/error.hpp"

namespace addivortes {

namespace {

// Below this lower truncation point the inverse CDF is well conditioned.
constexpr double kTailSwitch = 2.0;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Standard normal conditioned on Z > a.
double lower_truncated_standard(double a, Random& rng) {
  if (a < kTailSwitch) {
    const double tail = normal_sf(a);
    for (;;) {
      const double x = -normal_quantile(rng.uniform_open() * tail);
      if (x > a) return x;
    }
  }
  // Robert (1995): translated exponential proposal with the optimal rate.
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + rng.exponential(rate);
    const double diff = x - rate;
    if (std::log(rng.uniform_open()) <= -0.5 * diff * diff) return x;
  }
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ConfigError("normal quantile requires p in [0, 1]");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

std::size_t BinaryResponse::positives() const {
  std::size_t count = 0;
  for (auto v : y) count += (v == 1);
  return count;
}

void BinaryResponse::validate() const {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > 1) throw InputError("binary response has a value outside {0,1} at row " + std::to_string(i));
}

bool BinaryResponse::has_both_classes() const {
  const auto pos = positives();
  return pos > 0 && pos < y.size();
}

double sample_truncated_normal(double mean, bool positive_side, Random& rng) {
  // Work with W = +-(Z - mean) so the support is always W > a.
  if (positive_side) {
    for (;;) {
      const double z = mean + lower_truncated_standard(-mean, rng);
      if (z > 0.0) return z;
    }
  }
  return -(-mean + lower_truncated_standard(mean, rng));
}

void update_latents(LatentState& state, const BinaryResponse& y, Random& rng, double offset) {
  if (state.fitted.size() != y.size()) throw StructuralError("latent state and response lengths differ");
  state.z.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    state.z[i] = sample_truncated_normal(state.fitted[i] + offset, y.y[i] == 1, rng);
}

LatentState updated_latents(LatentState state, const BinaryResponse& y, Random& rng, double offset) {
  update_latents(state, y, rng, offset);
  return state;
}

bool sign_consistent(const LatentState& state, const BinaryResponse& y) {
  if (state.z.size() != y.size()) return false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = state.z[i];
    if (!std::isfinite(z)) return false;
    if (y.y[i] == 1 ? !(z > 0.0) : !(z <= 0.0)) return false;
  }
  return true;
}

}  // namespace addivortes
