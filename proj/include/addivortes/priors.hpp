#ifndef ADDIVORTES_PRIORS_HPP
#define ADDIVORTES_PRIORS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "addivortes/random.hpp"
#include "addivortes/tessellation.hpp"

namespace addivortes {

struct PriorConfig {
  double k = 3.0;         // mu-prior scale divisor
  std::size_t m = 200;    // number of tessellations
  double omega = 5.0;     // Poisson rate for the covariate count
  double lambda_c = 45.0; // Poisson rate for the centre count
  double sigma_c = 0.2;   // centre-location spread, standardized units
  std::size_t p = 1;      // number of covariates

  void validate() const;
};

// Standard deviation of the N(0, sigma_mu^2) cell-output prior: 3 / (k sqrt(m)).
double sigma_mu(double k, std::size_t m);

// Kernel-smoothed empirical density of each training column: a Gaussian
// mixture with one component of sd `bandwidth` per training value. It is the
// prior on a single centre coordinate and the proposal used to place one.
class CoordinateDensity {
 public:
  CoordinateDensity(const CovariateMatrix& x, double bandwidth);

  double log_density(std::size_t covariate, double value) const;
  // Uniform training value plus N(0, bandwidth^2) noise.
  double draw(std::size_t covariate, Random& rng) const;
  double bandwidth() const { return bandwidth_; }

 private:
  const CovariateMatrix* x_;
  double bandwidth_;
  double log_norm_;
  std::vector<std::vector<double>> values_;  // distinct training values per column
  std::vector<std::vector<double>> counts_;  // their multiplicities
};

// Factorized structure prior:
//   d = |dims|     ~ Poisson(omega) truncated to {1, ..., p}
//   b = #centres   ~ Poisson(lambda_c) truncated to {1, 2, ...}
//   dims | d       ~ uniform over the C(p, d) subsets
//   coordinates    ~ i.i.d. CoordinateDensity per used covariate
class StructurePrior {
 public:
  struct Factors {
    double covariate_count = 0.0;
    double centre_count = 0.0;
    double covariate_subset = 0.0;
    double coordinates = 0.0;
    double total() const { return covariate_count + centre_count + covariate_subset + coordinates; }
  };

  StructurePrior(PriorConfig config, const CovariateMatrix& x);

  const PriorConfig& config() const { return config_; }
  const CovariateMatrix& covariates() const { return *x_; }
  const CoordinateDensity& coordinates() const { return coordinates_; }

  double log_covariate_count(std::size_t d) const;
  double log_centre_count(std::size_t b) const;
  double log_covariate_subset(std::size_t d) const;
  double log_coordinates(const Tessellation& t) const;
  double log_centre_coordinates(const Tessellation& t, std::span<const double> centre) const;

  Factors factors(const Tessellation& t) const;
  double log_prior(const Tessellation& t) const { return factors(t).total(); }

 private:
  PriorConfig config_;
  const CovariateMatrix* x_;
  CoordinateDensity coordinates_;
  std::vector<double> log_count_pmf_;  // indexed by d, 1..p
  double log_centre_norm_;
};

double log_prior_tessellation(const Tessellation& t, const StructurePrior& prior);

// Per-cell sufficient statistics of a residual vector.
struct CellStats {
  std::vector<std::size_t> counts;
  std::vector<double> sums;
};

CellStats cell_stats(std::span<const std::uint32_t> cell_of_row, std::size_t cells,
                     std::span<const double> residuals);
CellStats cell_stats(const Tessellation& t, const CovariateMatrix& x, std::span<const double> residuals);

// Log marginal likelihood of the residuals with cell outputs integrated out
// under N(0, sigma_mu^2) and unit noise, dropping the terms shared by every
// tessellation over the same residuals:
//   sum_i [ -0.5 log(1 + n_i s2) + s2 S_i^2 / (2 (1 + n_i s2)) ]
double log_marginal_likelihood(const CellStats& stats, double sigma_mu);
double log_marginal_likelihood(const Tessellation& t, std::span<const double> residuals,
                               const CovariateMatrix& x, double sigma_mu);

// The constants dropped above: -(n/2) log(2 pi) - 0.5 sum r^2.
double log_likelihood_constant(std::span<const double> residuals);

struct CellPosterior {
  double mean;
  double variance;
};

// Conjugate full conditional of one cell's output.
CellPosterior cell_posterior(std::size_t count, double sum, double sigma_mu);

CellOutputs draw_cell_outputs(const CellStats& stats, double sigma_mu, Random& rng);
CellOutputs draw_cell_outputs(const Tessellation& t, std::span<const double> residuals,
                              const CovariateMatrix& x, double sigma_mu, Random& rng);

}  // namespace addivortes

#endif
