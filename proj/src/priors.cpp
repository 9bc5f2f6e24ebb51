#include "addivortes/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "addivortes/error.hpp"

namespace addivortes {

namespace {

double log_poisson(std::size_t k, double rate) {
  const double kd = static_cast<double>(k);
  return kd * std::log(rate) - rate - std::lgamma(kd + 1.0);
}

double log_binomial(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

void PriorConfig::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("k must be positive");
  if (m < 1) throw ConfigError("m must be at least 1");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
  if (!(lambda_c > 0.0) || !std::isfinite(lambda_c)) throw ConfigError("lambda_c must be positive");
  if (!(sigma_c > 0.0) || !std::isfinite(sigma_c)) throw ConfigError("sigma_c must be positive");
  if (p < 1) throw ConfigError("p must be at least 1");
}

double sigma_mu(double k, std::size_t m) {
  if (!(k > 0.0) || m < 1) throw ConfigError("sigma_mu requires k > 0 and m >= 1");
  return 3.0 / (k * std::sqrt(static_cast<double>(m)));
}

CoordinateDensity::CoordinateDensity(const CovariateMatrix& x, double bandwidth)
    : x_(&x), bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0)) throw ConfigError("coordinate density bandwidth must be positive");
  log_norm_ = -std::log(static_cast<double>(x.rows())) - std::log(bandwidth) -
              0.5 * std::log(2.0 * std::numbers::pi);
  // Repeated training values become one weighted mixture component.
  values_.resize(x.cols());
  counts_.resize(x.cols());
  for (std::size_t k = 0; k < x.cols(); ++k) {
    std::vector<double> sorted(x.column(k).begin(), x.column(k).end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i > 0 && sorted[i] == sorted[i - 1]) {
        counts_[k].back() += 1.0;
      } else {
        values_[k].push_back(sorted[i]);
        counts_[k].push_back(1.0);
      }
    }
  }
}

double CoordinateDensity::log_density(std::size_t covariate, double value) const {
  const auto& values = values_.at(covariate);
  const auto& counts = counts_[covariate];
  const double inv = 1.0 / bandwidth_;
  double max_term = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    const double z = (value - v) * inv;
    max_term = std::max(max_term, -0.5 * z * z);
  }
  double acc = 0.0;
  for (std::size_t u = 0; u < values.size(); ++u) {
    const double z = (value - values[u]) * inv;
    acc += counts[u] * std::exp(-0.5 * z * z - max_term);
  }
  return log_norm_ + max_term + std::log(acc);
}

double CoordinateDensity::draw(std::size_t covariate, Random& rng) const {
  const std::size_t r = rng.index(x_->rows());
  return (*x_)(r, covariate) + bandwidth_ * rng.normal();
}

StructurePrior::StructurePrior(PriorConfig config, const CovariateMatrix& x)
    : config_(config), x_(&x), coordinates_(x, config.sigma_c) {
  config_.p = x.cols();
  config_.validate();
  const std::size_t p = config_.p;
  log_count_pmf_.assign(p + 1, -std::numeric_limits<double>::infinity());
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 1; d <= p; ++d) max_term = std::max(max_term, log_poisson(d, config_.omega));
  double acc = 0.0;
  for (std::size_t d = 1; d <= p; ++d) acc += std::exp(log_poisson(d, config_.omega) - max_term);
  const double log_norm = max_term + std::log(acc);
  for (std::size_t d = 1; d <= p; ++d) log_count_pmf_[d] = log_poisson(d, config_.omega) - log_norm;
  // P(b >= 1) = 1 - exp(-lambda)
  log_centre_norm_ = std::log(-std::expm1(-config_.lambda_c));
}

double StructurePrior::log_covariate_count(std::size_t d) const {
  if (d < 1 || d > config_.p) throw StructuralError("covariate count outside 1..p");
  return log_count_pmf_[d];
}

double StructurePrior::log_centre_count(std::size_t b) const {
  if (b < 1) throw StructuralError("centre count must be at least 1");
  return log_poisson(b, config_.lambda_c) - log_centre_norm_;
}

double StructurePrior::log_covariate_subset(std::size_t d) const {
  if (d < 1 || d > config_.p) throw StructuralError("covariate count outside 1..p");
  return -log_binomial(config_.p, d);
}

double StructurePrior::log_centre_coordinates(const Tessellation& t, std::span<const double> centre) const {
  double total = 0.0;
  for (std::size_t k = 0; k < t.dims.size(); ++k) total += coordinates_.log_density(t.dims[k], centre[k]);
  return total;
}

double StructurePrior::log_coordinates(const Tessellation& t) const {
  double total = 0.0;
  for (std::size_t c = 0; c < t.centre_count(); ++c) total += log_centre_coordinates(t, t.centre(c));
  return total;
}

StructurePrior::Factors StructurePrior::factors(const Tessellation& t) const {
  if (t.dimension() > config_.p) throw StructuralError("tessellation uses more covariates than exist");
  t.validate(config_.p);
  Factors f;
  f.covariate_count = log_covariate_count(t.dimension());
  f.centre_count = log_centre_count(t.centre_count());
  f.covariate_subset = log_covariate_subset(t.dimension());
  f.coordinates = log_coordinates(t);
  return f;
}

double log_prior_tessellation(const Tessellation& t, const StructurePrior& prior) { return prior.log_prior(t); }

CellStats cell_stats(std::span<const std::uint32_t> cell_of_row, std::size_t cells,
                     std::span<const double> residuals) {
  if (cell_of_row.size() != residuals.size()) throw StructuralError("residual length does not match row count");
  CellStats stats;
  stats.counts.assign(cells, 0);
  stats.sums.assign(cells, 0.0);
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    ++stats.counts[cell_of_row[i]];
    stats.sums[cell_of_row[i]] += residuals[i];
  }
  return stats;
}

CellStats cell_stats(const Tessellation& t, const CovariateMatrix& x, std::span<const double> residuals) {
  if (residuals.size() != x.rows()) throw StructuralError("residual length does not match row count");
  return cell_stats(assign_rows(t, x), t.centre_count(), residuals);
}

double log_marginal_likelihood(const CellStats& stats, double sigma_mu) {
  const double s2 = sigma_mu * sigma_mu;
  double total = 0.0;
  for (std::size_t i = 0; i < stats.counts.size(); ++i) {
    if (stats.counts[i] == 0) continue;
    const double sum = stats.sums[i];
    if (!std::isfinite(sum)) throw NumericError("non-finite residual sum in marginal likelihood");
    const double scale = 1.0 + static_cast<double>(stats.counts[i]) * s2;
    total += -0.5 * std::log(scale) + s2 * sum * sum / (2.0 * scale);
  }
  return total;
}

double log_marginal_likelihood(const Tessellation& t, std::span<const double> residuals,
                               const CovariateMatrix& x, double sigma_mu) {
  for (double r : residuals)
    if (!std::isfinite(r)) throw NumericError("non-finite residual");
  return log_marginal_likelihood(cell_stats(t, x, residuals), sigma_mu);
}

double log_likelihood_constant(std::span<const double> residuals) {
  double ss = 0.0;
  for (double r : residuals) ss += r * r;
  return -0.5 * static_cast<double>(residuals.size()) * std::log(2.0 * std::numbers::pi) - 0.5 * ss;
}

CellPosterior cell_posterior(std::size_t count, double sum, double sigma_mu) {
  const double precision = static_cast<double>(count) + 1.0 / (sigma_mu * sigma_mu);
  return {sum / precision, 1.0 / precision};
}

CellOutputs draw_cell_outputs(const CellStats& stats, double sigma_mu, Random& rng) {
  CellOutputs out;
  out.values.resize(stats.counts.size());
  for (std::size_t i = 0; i < stats.counts.size(); ++i) {
    const auto post = cell_posterior(stats.counts[i], stats.sums[i], sigma_mu);
    out.values[i] = post.mean + std::sqrt(post.variance) * rng.normal();
  }
  return out;
}

CellOutputs draw_cell_outputs(const Tessellation& t, std::span<const double> residuals,
                              const CovariateMatrix& x, double sigma_mu, Random& rng) {
  return draw_cell_outputs(cell_stats(t, x, residuals), sigma_mu, rng);
}

}  // namespace addivortes
