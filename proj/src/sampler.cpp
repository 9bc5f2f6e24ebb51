#include "addivortes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "addivortes/error.hpp"
#include "addivortes/log.hpp"

namespace addivortes {

void SamplerConfig::validate() const {
  if (m < 1) throw ConfigError("m must be at least 1");
  if (post_draws < 1) throw ConfigError("post_draws must be at least 1");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0,1)");
  prior(1).validate();
}

PriorConfig SamplerConfig::prior(std::size_t p) const {
  PriorConfig c;
  c.k = k;
  c.m = m;
  c.omega = omega;
  c.lambda_c = lambda_c;
  c.sigma_c = sigma_c;
  c.p = p;
  return c;
}

double SamplerConfig::offset() const { return normal_quantile(p0); }

double SamplerConfig::sigma_mu() const { return addivortes::sigma_mu(k, m); }

void MoveCounters::record(const StepResult& r) {
  const auto i = static_cast<std::size_t>(r.move);
  ++proposed[i];
  if (r.accepted) ++accepted[i];
}

MoveCounters& MoveCounters::operator+=(const MoveCounters& other) {
  for (std::size_t i = 0; i < kMoveCount; ++i) {
    proposed[i] += other.proposed[i];
    accepted[i] += other.accepted[i];
  }
  return *this;
}

double MoveCounters::acceptance_rate() const {
  std::uint64_t p = 0;
  std::uint64_t a = 0;
  for (std::size_t i = 0; i < kMoveCount; ++i) {
    p += proposed[i];
    a += accepted[i];
  }
  return p == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(p);
}

MoveCounters PosteriorDraws::total_moves() const {
  MoveCounters total;
  for (const auto& s : sweeps) total += s.moves;
  return total;
}

GibbsSampler::GibbsSampler(const CovariateMatrix& x, const BinaryResponse& y, SamplerConfig config)
    : x_(&x), y_(&y), config_(config), rng_(config.seed) {
  config_.validate();
  y.validate();
  if (y.size() != x.rows()) throw StructuralError("response length does not match covariate rows");
  if (!y.has_both_classes()) warn("training response contains a single class");
  sigma_mu_ = config_.sigma_mu();
  offset_ = config_.offset();
  prior_ = std::make_unique<StructurePrior>(config_.prior(x.cols()), x);
  kernel_ = std::make_unique<MhKernel>(*prior_, sigma_mu_);

  const std::size_t n = x.rows();
  members_.resize(config_.m);
  cells_.assign(config_.m, std::vector<std::uint32_t>(n, 0u));
  for (auto& member : members_) {
    const std::size_t covariate = rng_.index(x.cols());
    const std::size_t row = rng_.index(n);
    member.structure.dims = {covariate};
    member.structure.centres = {x(row, covariate)};
    member.outputs.values = {0.0};
  }
  latent_.fitted.assign(n, 0.0);
  update_latents(latent_, y, rng_, offset_);
  residuals_.resize(n);
}

void GibbsSampler::sweep() {
  const std::size_t n = x_->rows();
  update_latents(latent_, *y_, rng_, offset_);
  SweepDiagnostics diag;
  std::vector<double> partial(n);
  double centres = 0.0;
  double dims = 0.0;
  for (std::size_t j = 0; j < members_.size(); ++j) {
    auto& member = members_[j];
    auto& cells = cells_[j];
    {
      const double* mu = member.outputs.values.data();
      for (std::size_t i = 0; i < n; ++i) {
        partial[i] = latent_.fitted[i] - mu[cells[i]];
        residuals_[i] = latent_.z[i] - offset_ - partial[i];
      }
    }
    if (!config_.freeze_structures) diag.moves.record(kernel_->step(member.structure, cells, residuals_, rng_));
    const std::size_t b = member.structure.centre_count();
    if (!config_.freeze_outputs) {
      member.outputs = draw_cell_outputs(cell_stats(cells, b, residuals_), sigma_mu_, rng_);
    } else if (member.outputs.values.size() != b) {
      member.outputs.values.assign(b, 0.0);
    }
    const double* mu = member.outputs.values.data();
    for (std::size_t i = 0; i < n; ++i) latent_.fitted[i] = partial[i] + mu[cells[i]];
    centres += static_cast<double>(b);
    dims += static_cast<double>(member.structure.dimension());
  }
  diag.mean_centres = centres / static_cast<double>(members_.size());
  diag.mean_dims = dims / static_cast<double>(members_.size());
  last_ = diag;
  ++sweeps_;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(latent_.fitted[i]) || !std::isfinite(latent_.z[i])) {
      std::ostringstream msg;
      msg << "non-finite latent state at sweep " << sweeps_ << ", row " << i;
      throw NumericError(msg.str());
    }
  }
  if (config_.check_every > 0 && sweeps_ % config_.check_every == 0) check_fit();
}

double GibbsSampler::fit_drift() const {
  const auto fresh = ensemble_sum(*x_, snapshot());
  double drift = 0.0;
  for (std::size_t i = 0; i < fresh.size(); ++i) drift = std::max(drift, std::abs(fresh[i] - latent_.fitted[i]));
  return drift;
}

void GibbsSampler::check_fit() {
  auto fresh = ensemble_sum(*x_, snapshot());
  double drift = 0.0;
  for (std::size_t i = 0; i < fresh.size(); ++i) drift = std::max(drift, std::abs(fresh[i] - latent_.fitted[i]));
  if (drift > 1e-8) {
    std::ostringstream msg;
    msg << "running fit drifted by " << drift << " from recomputation at sweep " << sweeps_;
    throw NumericError(msg.str());
  }
  latent_.fitted = std::move(fresh);
}

Ensemble GibbsSampler::snapshot() const { return Ensemble{members_}; }

PosteriorDraws run_gibbs(const CovariateMatrix& x, const BinaryResponse& y, const SamplerConfig& config,
                         const DrawObserver& observer, bool store_draws) {
  GibbsSampler sampler(x, y, config);
  PosteriorDraws out;
  out.p = x.cols();
  out.offset = config.offset();
  const std::size_t total = config.burn_in + config.post_draws * config.thin;
  out.sweeps.reserve(total);
  if (store_draws) out.draws.reserve(config.post_draws);
  std::size_t kept = 0;
  for (std::size_t s = 1; s <= total; ++s) {
    sampler.sweep();
    out.sweeps.push_back(sampler.last_sweep());
    if (s > config.burn_in && (s - config.burn_in) % config.thin == 0) {
      Ensemble snap = sampler.snapshot();
      if (observer) observer(kept, snap);
      if (store_draws) out.draws.push_back(std::move(snap));
      ++kept;
    }
  }
  return out;
}

std::vector<double> draw_probabilities(const PosteriorDraws& draws, std::span<const double> x) {
  std::vector<double> out;
  out.reserve(draws.size());
  for (const auto& e : draws.draws) out.push_back(normal_cdf(ensemble_sum(x, e) + draws.offset));
  return out;
}

double predict_proba(const PosteriorDraws& draws, std::span<const double> x) {
  if (draws.draws.empty()) throw StructuralError("no posterior draws");
  double total = 0.0;
  for (double p : draw_probabilities(draws, x)) total += p;
  return total / static_cast<double>(draws.size());
}

int predict_class(double probability, double threshold) { return probability > threshold ? 1 : 0; }

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw StructuralError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Interval posterior_interval(std::span<const double> draw_probabilities, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("interval level alpha must lie in (0,1)");
  std::vector<double> v(draw_probabilities.begin(), draw_probabilities.end());
  return {sample_quantile(v, alpha / 2.0), sample_quantile(v, 1.0 - alpha / 2.0)};
}

Interval posterior_interval(const PosteriorDraws& draws, std::span<const double> x, double alpha) {
  const auto probs = draw_probabilities(draws, x);
  return posterior_interval(probs, alpha);
}

std::vector<double> variable_inclusion(const PosteriorDraws& draws) {
  if (draws.draws.empty()) throw StructuralError("no posterior draws");
  std::vector<double> counts(draws.p, 0.0);
  double pairs = 0.0;
  for (const auto& e : draws.draws) {
    for (const auto& member : e.members) {
      for (std::size_t k : member.structure.dims) counts.at(k) += 1.0;
      pairs += 1.0;
    }
  }
  for (auto& c : counts) c = 100.0 * c / pairs;
  return counts;
}

PredictionAccumulator::PredictionAccumulator(const CovariateMatrix& x, double offset, bool keep_draws)
    : x_(&x), offset_(offset), keep_(keep_draws), sum_(x.rows(), 0.0) {
  if (keep_) per_row_.resize(x.rows());
}

void PredictionAccumulator::add(const Ensemble& ensemble) {
  fit_.assign(x_->rows(), 0.0);
  for (const auto& member : ensemble.members) accumulate_outputs(member, *x_, fit_, cells_, scratch_);
  for (std::size_t i = 0; i < fit_.size(); ++i) {
    const double p = normal_cdf(fit_[i] + offset_);
    sum_[i] += p;
    if (keep_) per_row_[i].push_back(p);
  }
  ++count_;
}

std::vector<double> PredictionAccumulator::mean_probabilities() const {
  if (count_ == 0) throw StructuralError("no draws accumulated");
  std::vector<double> out(sum_.size());
  for (std::size_t i = 0; i < sum_.size(); ++i) out[i] = sum_[i] / static_cast<double>(count_);
  return out;
}

std::span<const double> PredictionAccumulator::row_draws(std::size_t row) const {
  if (!keep_) throw StructuralError("per-draw probabilities were not kept");
  return per_row_.at(row);
}

}  // namespace addivortes
