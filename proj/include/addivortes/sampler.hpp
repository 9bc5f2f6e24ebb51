#ifndef ADDIVORTES_SAMPLER_HPP
#define ADDIVORTES_SAMPLER_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "addivortes/moves.hpp"
#include "addivortes/priors.hpp"
#include "addivortes/probit.hpp"
#include "addivortes/random.hpp"
#include "addivortes/tessellation.hpp"

namespace addivortes {

struct SamplerConfig {
  std::size_t m = 200;
  double k = 3.0;
  double omega = 5.0;
  double lambda_c = 45.0;
  double sigma_c = 0.2;
  std::size_t burn_in = 1000;
  std::size_t post_draws = 1000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  double threshold = 0.5;
  double p0 = 0.5;
  // Sweeps between full recomputations of the running fit.
  std::size_t check_every = 100;
  // Test hooks: freeze structures / cell outputs.
  bool freeze_structures = false;
  bool freeze_outputs = false;

  void validate() const;
  PriorConfig prior(std::size_t p) const;
  double offset() const;
  double sigma_mu() const;
};

struct MoveCounters {
  std::array<std::uint64_t, kMoveCount> proposed{};
  std::array<std::uint64_t, kMoveCount> accepted{};

  void record(const StepResult& r);
  MoveCounters& operator+=(const MoveCounters& other);
  double acceptance_rate() const;
};

struct SweepDiagnostics {
  MoveCounters moves;
  double mean_centres = 0.0;
  double mean_dims = 0.0;
};

struct PosteriorDraws {
  std::size_t p = 0;
  double offset = 0.0;
  std::vector<Ensemble> draws;
  std::vector<SweepDiagnostics> sweeps;

  std::size_t size() const { return draws.size(); }
  MoveCounters total_moves() const;
};

// Called with (retained draw index, ensemble) for every kept snapshot.
using DrawObserver = std::function<void(std::size_t, const Ensemble&)>;

// One chain of the probit backfitting sampler.
class GibbsSampler {
 public:
  GibbsSampler(const CovariateMatrix& x, const BinaryResponse& y, SamplerConfig config);

  // Latent draws, then one MH + output update per tessellation.
  void sweep();

  Ensemble snapshot() const;
  const LatentState& latent() const { return latent_; }
  const SweepDiagnostics& last_sweep() const { return last_; }
  std::size_t sweeps_done() const { return sweeps_; }
  const SamplerConfig& config() const { return config_; }
  // Max |running fit - recomputed fit|.
  double fit_drift() const;

 private:
  void check_fit();

  const CovariateMatrix* x_;
  const BinaryResponse* y_;
  SamplerConfig config_;
  double sigma_mu_;
  double offset_;
  Random rng_;
  std::unique_ptr<StructurePrior> prior_;
  std::unique_ptr<MhKernel> kernel_;
  std::vector<EnsembleMember> members_;
  std::vector<std::vector<std::uint32_t>> cells_;
  LatentState latent_;
  std::vector<double> residuals_;
  SweepDiagnostics last_;
  std::size_t sweeps_ = 0;
};

// burn_in + post_draws * thin sweeps; keeps every thin-th post-burn-in
// snapshot. With store_draws false only the observer sees the snapshots.
PosteriorDraws run_gibbs(const CovariateMatrix& x, const BinaryResponse& y, const SamplerConfig& config,
                         const DrawObserver& observer = {}, bool store_draws = true);

// Phi(G^(k)(x) + c) for each draw k.
std::vector<double> draw_probabilities(const PosteriorDraws& draws, std::span<const double> x);

double predict_proba(const PosteriorDraws& draws, std::span<const double> x);

int predict_class(double probability, double threshold = 0.5);

struct Interval {
  double lo;
  double hi;
};

// Linear-interpolation (R type 7) sample quantile of unsorted values.
double sample_quantile(std::vector<double> values, double q);

// alpha/2 and 1 - alpha/2 quantiles of the per-draw probabilities.
Interval posterior_interval(const PosteriorDraws& draws, std::span<const double> x, double alpha);
Interval posterior_interval(std::span<const double> draw_probabilities, double alpha);

// Percentage of (draw, tessellation) pairs that use each covariate.
std::vector<double> variable_inclusion(const PosteriorDraws& draws);

// Per-draw probabilities for a fixed matrix, accumulated as snapshots
// arrive so the snapshots themselves need not be stored.
class PredictionAccumulator {
 public:
  PredictionAccumulator(const CovariateMatrix& x, double offset, bool keep_draws = false);

  void add(const Ensemble& ensemble);
  std::size_t draws() const { return count_; }
  std::vector<double> mean_probabilities() const;
  // Row-major [row][draw]; only when keep_draws.
  std::span<const double> row_draws(std::size_t row) const;

 private:
  const CovariateMatrix* x_;
  double offset_;
  bool keep_;
  std::size_t count_ = 0;
  std::vector<double> sum_;
  std::vector<std::vector<double>> per_row_;
  std::vector<double> fit_;
  std::vector<std::uint32_t> cells_;
  std::vector<double> scratch_;
};

}  // namespace addivortes

#endif
