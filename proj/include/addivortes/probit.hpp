#ifndef ADDIVORTES_PROBIT_HPP
#define ADDIVORTES_PROBIT_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "addivortes/random.hpp"

namespace addivortes {

double normal_cdf(double x);
// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);
double normal_quantile(double p);

// Binary target; y = 1 is the target class.
struct BinaryResponse {
  std::vector<std::uint8_t> y;

  std::size_t size() const { return y.size(); }
  std::size_t positives() const;
  // Throws InputError on values outside {0, 1}.
  void validate() const;
  bool has_both_classes() const;
};

// Latent probit variables and the cached ensemble fit for each row.
struct LatentState {
  std::vector<double> z;
  std::vector<double> fitted;
};

// One draw from N(mean, 1) restricted to (0, inf) when positive_side, else
// to (-inf, 0]. Inverse CDF near the bulk, exponential rejection in the tail.
double sample_truncated_normal(double mean, bool positive_side, Random& rng);

// Redraws every z_i from N(fitted_i + offset, 1) truncated to the side given
// by y_i. `offset` is the prior-centering shift Phi^{-1}(p0).
void update_latents(LatentState& state, const BinaryResponse& y, Random& rng, double offset = 0.0);
LatentState updated_latents(LatentState state, const BinaryResponse& y, Random& rng, double offset = 0.0);

// z_i > 0 iff y_i = 1, and every z_i finite.
bool sign_consistent(const LatentState& state, const BinaryResponse& y);

}  // namespace addivortes

#endif
