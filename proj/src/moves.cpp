#include "addivortes/moves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "addivortes/error.hpp"

namespace addivortes {

namespace {

constexpr int kDuplicateRetries = 10;

double log_select(MoveKind move) { return std::log(kMoveProbabilities[static_cast<std::size_t>(move)]); }

double log_size(std::size_t n) { return std::log(static_cast<double>(n)); }

// log of (1/n) sum_r prod_k N(c_k; x_{r, dims_k}, sigma^2): the density of a
// centre placed at a uniform training row plus isotropic noise.
double log_joint_centre_density(const StructurePrior& prior, std::span<const std::size_t> dims,
                                std::span<const double> centre) {
  const auto& x = prior.covariates();
  const double sigma = prior.config().sigma_c;
  const double inv = 1.0 / sigma;
  const std::size_t n = x.rows();
  const std::size_t d = dims.size();
  std::vector<double> exponent(n, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const double* col = x.column(dims[k]).data();
    for (std::size_t r = 0; r < n; ++r) {
      const double z = (centre[k] - col[r]) * inv;
      exponent[r] -= 0.5 * z * z;
    }
  }
  const double max_term = *std::max_element(exponent.begin(), exponent.end());
  double acc = 0.0;
  for (double e : exponent) acc += std::exp(e - max_term);
  const double dd = static_cast<double>(d);
  return max_term + std::log(acc) - log_size(n) - dd * std::log(sigma) - 0.5 * dd * std::log(2.0 * std::numbers::pi);
}

double log_isotropic_normal(std::span<const double> value, std::span<const double> mean, double sigma) {
  double total = 0.0;
  for (std::size_t k = 0; k < value.size(); ++k) {
    const double z = (value[k] - mean[k]) / sigma;
    total += -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return total;
}

// Per-move proposal densities. The first argument is the state moved from.

double density_add_centre(const StructurePrior& prior, const Tessellation& from, std::span<const double> centre) {
  // insertion slot is uniform over b + 1 positions
  return log_select(MoveKind::AddCentre) - log_size(from.centre_count() + 1) +
         log_joint_centre_density(prior, from.dims, centre);
}

double density_remove_centre(const Tessellation& from) {
  return log_select(MoveKind::RemoveCentre) - log_size(from.centre_count());
}

double density_add_covariate(const StructurePrior& prior, const Tessellation& from, double log_coords) {
  return log_select(MoveKind::AddCovariate) - log_size(prior.config().p - from.dimension()) + log_coords;
}

double density_remove_covariate(const Tessellation& from) {
  return log_select(MoveKind::RemoveCovariate) - log_size(from.dimension());
}

double density_swap_covariate(const StructurePrior& prior, const Tessellation& from, double log_coords) {
  return log_select(MoveKind::SwapCovariate) - log_size(from.dimension()) -
         log_size(prior.config().p - from.dimension()) + log_coords;
}

double density_move_centre(const StructurePrior& prior, const Tessellation& from, std::span<const double> old_centre,
                           std::span<const double> new_centre) {
  return log_select(MoveKind::MoveCentre) - log_size(from.centre_count()) +
         log_isotropic_normal(new_centre, old_centre, prior.config().sigma_c);
}

double column_log_density(const StructurePrior& prior, const Tessellation& t, std::size_t slot) {
  double total = 0.0;
  const std::size_t covariate = t.dims[slot];
  for (std::size_t c = 0; c < t.centre_count(); ++c)
    total += prior.coordinates().log_density(covariate, t.centre(c)[slot]);
  return total;
}

bool equal_centres(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

bool has_duplicate_of(const Tessellation& t, std::size_t index) {
  const auto c = t.centre(index);
  for (std::size_t i = 0; i < t.centre_count(); ++i)
    if (i != index && equal_centres(t.centre(i), c)) return true;
  return false;
}

bool has_any_duplicate(const Tessellation& t) {
  for (std::size_t i = 0; i < t.centre_count(); ++i)
    for (std::size_t j = i + 1; j < t.centre_count(); ++j)
      if (equal_centres(t.centre(i), t.centre(j))) return true;
  return false;
}

// Inserts a coordinate column for `covariate` at its sorted position and
// returns the slot index.
std::size_t insert_dimension(Tessellation& t, std::size_t covariate, std::span<const double> column) {
  const std::size_t slot =
      static_cast<std::size_t>(std::lower_bound(t.dims.begin(), t.dims.end(), covariate) - t.dims.begin());
  const std::size_t d = t.dims.size();
  // column.size() rather than centre_count(): t may have no dims mid-swap
  const std::size_t b = column.size();
  std::vector<double> centres;
  centres.reserve(b * (d + 1));
  for (std::size_t c = 0; c < b; ++c) {
    const auto old = t.centre(c);
    centres.insert(centres.end(), old.begin(), old.begin() + static_cast<std::ptrdiff_t>(slot));
    centres.push_back(column[c]);
    centres.insert(centres.end(), old.begin() + static_cast<std::ptrdiff_t>(slot), old.end());
  }
  t.dims.insert(t.dims.begin() + static_cast<std::ptrdiff_t>(slot), covariate);
  t.centres = std::move(centres);
  return slot;
}

void erase_dimension(Tessellation& t, std::size_t slot) {
  const std::size_t d = t.dims.size();
  const std::size_t b = t.centre_count();
  std::vector<double> centres;
  centres.reserve(b * (d - 1));
  for (std::size_t c = 0; c < b; ++c) {
    const auto old = t.centre(c);
    for (std::size_t k = 0; k < d; ++k)
      if (k != slot) centres.push_back(old[k]);
  }
  t.dims.erase(t.dims.begin() + static_cast<std::ptrdiff_t>(slot));
  t.centres = std::move(centres);
}

std::vector<std::size_t> unused_covariates(const Tessellation& t, std::size_t p) {
  std::vector<std::size_t> out;
  out.reserve(p - t.dimension());
  for (std::size_t k = 0; k < p; ++k)
    if (!t.uses(k)) out.push_back(k);
  return out;
}

std::optional<Proposal> propose_add_centre(const Tessellation& t, const StructurePrior& prior, Random& rng) {
  const std::size_t b = t.centre_count();
  const std::size_t d = t.dimension();
  const auto& x = prior.covariates();
  const double sigma = prior.config().sigma_c;
  for (int attempt = 0; attempt < kDuplicateRetries; ++attempt) {
    const std::size_t row = rng.index(x.rows());
    std::vector<double> centre(d);
    for (std::size_t k = 0; k < d; ++k) centre[k] = x(row, t.dims[k]) + sigma * rng.normal();
    const std::size_t slot = rng.index(b + 1);
    Proposal p{MoveKind::AddCentre, t, 0.0, 0.0, slot};
    p.candidate.centres.insert(p.candidate.centres.begin() + static_cast<std::ptrdiff_t>(slot * d), centre.begin(),
                               centre.end());
    if (has_duplicate_of(p.candidate, slot)) continue;
    p.log_forward_minus_reverse = density_add_centre(prior, t, centre) - density_remove_centre(p.candidate);
    p.log_prior_delta = prior.log_centre_count(b + 1) - prior.log_centre_count(b) +
                        prior.log_centre_coordinates(t, centre);
    return p;
  }
  return std::nullopt;
}

std::optional<Proposal> propose_remove_centre(const Tessellation& t, const StructurePrior& prior, Random& rng) {
  const std::size_t b = t.centre_count();
  if (b < 2) return std::nullopt;
  const std::size_t d = t.dimension();
  const std::size_t slot = rng.index(b);
  const std::vector<double> removed(t.centre(slot).begin(), t.centre(slot).end());
  Proposal p{MoveKind::RemoveCentre, t, 0.0, 0.0, slot};
  p.candidate.centres.erase(p.candidate.centres.begin() + static_cast<std::ptrdiff_t>(slot * d),
                            p.candidate.centres.begin() + static_cast<std::ptrdiff_t>((slot + 1) * d));
  p.log_forward_minus_reverse = density_remove_centre(t) - density_add_centre(prior, p.candidate, removed);
  p.log_prior_delta = prior.log_centre_count(b - 1) - prior.log_centre_count(b) -
                      prior.log_centre_coordinates(t, removed);
  return p;
}

std::optional<Proposal> propose_add_covariate(const Tessellation& t, const StructurePrior& prior, Random& rng) {
  const std::size_t p_total = prior.config().p;
  const std::size_t d = t.dimension();
  if (d >= p_total) return std::nullopt;
  const auto unused = unused_covariates(t, p_total);
  const std::size_t covariate = unused[rng.index(unused.size())];
  const std::size_t b = t.centre_count();
  std::vector<double> column(b);
  for (std::size_t c = 0; c < b; ++c) column[c] = prior.coordinates().draw(covariate, rng);
  Proposal p{MoveKind::AddCovariate, t, 0.0, 0.0};
  const std::size_t slot = insert_dimension(p.candidate, covariate, column);
  const double log_coords = column_log_density(prior, p.candidate, slot);
  p.log_forward_minus_reverse = density_add_covariate(prior, t, log_coords) - density_remove_covariate(p.candidate);
  p.log_prior_delta = prior.log_covariate_count(d + 1) - prior.log_covariate_count(d) +
                      prior.log_covariate_subset(d + 1) - prior.log_covariate_subset(d) + log_coords;
  return p;
}

std::optional<Proposal> propose_remove_covariate(const Tessellation& t, const StructurePrior& prior, Random& rng) {
  const std::size_t d = t.dimension();
  if (d < 2) return std::nullopt;
  const std::size_t slot = rng.index(d);
  const double log_coords = column_log_density(prior, t, slot);
  Proposal p{MoveKind::RemoveCovariate, t, 0.0, 0.0};
  erase_dimension(p.candidate, slot);
  if (has_any_duplicate(p.candidate)) return std::nullopt;
  p.log_forward_minus_reverse = density_remove_covariate(t) - density_add_covariate(prior, p.candidate, log_coords);
  p.log_prior_delta = prior.log_covariate_count(d - 1) - prior.log_covariate_count(d) +
                      prior.log_covariate_subset(d - 1) - prior.log_covariate_subset(d) - log_coords;
  return p;
}

std::optional<Proposal> propose_swap_covariate(const Tessellation& t, const StructurePrior& prior, Random& rng) {
  const std::size_t p_total = prior.config().p;
  const std::size_t d = t.dimension();
  if (d >= p_total) return std::nullopt;
  const std::size_t old_slot = rng.index(d);
  const auto unused = unused_covariates(t, p_total);
  const std::size_t covariate = unused[rng.index(unused.size())];
  const double log_old = column_log_density(prior, t, old_slot);
  const std::size_t b = t.centre_count();
  for (int attempt = 0; attempt < kDuplicateRetries; ++attempt) {
    std::vector<double> column(b);
    for (std::size_t c = 0; c < b; ++c) column[c] = prior.coordinates().draw(covariate, rng);
    Proposal p{MoveKind::SwapCovariate, t, 0.0, 0.0};
    erase_dimension(p.candidate, old_slot);
    const std::size_t slot = insert_dimension(p.candidate, covariate, column);
    if (has_any_duplicate(p.candidate)) continue;
    const double log_new = column_log_density(prior, p.candidate, slot);
    p.log_forward_minus_reverse = density_swap_covariate(prior, t, log_new) - density_swap_covariate(prior, p.candidate, log_old);
    p.log_prior_delta = log_new - log_old;
    return p;
  }
  return std::nullopt;
}

std::optional<Proposal> propose_move_centre(const Tessellation& t, const StructurePrior& prior, Random& rng) {
  const std::size_t b = t.centre_count();
  const std::size_t d = t.dimension();
  const double sigma = prior.config().sigma_c;
  const std::size_t slot = rng.index(b);
  const std::vector<double> old_centre(t.centre(slot).begin(), t.centre(slot).end());
  for (int attempt = 0; attempt < kDuplicateRetries; ++attempt) {
    Proposal p{MoveKind::MoveCentre, t, 0.0, 0.0, slot};
    auto moved = p.candidate.centre(slot);
    for (std::size_t k = 0; k < d; ++k) moved[k] = old_centre[k] + sigma * rng.normal();
    if (has_duplicate_of(p.candidate, slot)) continue;
    p.log_forward_minus_reverse = density_move_centre(prior, t, old_centre, moved) -
                                  density_move_centre(prior, p.candidate, moved, old_centre);
    p.log_prior_delta = prior.log_centre_coordinates(t, moved) - prior.log_centre_coordinates(t, old_centre);
    return p;
  }
  return std::nullopt;
}

// Index of the first centre that differs between two centre lists.
std::size_t first_difference(const Tessellation& a, const Tessellation& b) {
  const std::size_t n = std::min(a.centre_count(), b.centre_count());
  for (std::size_t i = 0; i < n; ++i)
    if (!equal_centres(a.centre(i), b.centre(i))) return i;
  return n;
}

// Slot in `wide` of the single covariate that `narrow` lacks.
std::size_t extra_dimension_slot(const Tessellation& wide, const Tessellation& narrow) {
  for (std::size_t k = 0; k < wide.dims.size(); ++k)
    if (!narrow.uses(wide.dims[k])) return k;
  throw StructuralError("tessellations do not differ by a covariate");
}

}  // namespace

std::string_view move_name(MoveKind move) {
  switch (move) {
    case MoveKind::AddCentre: return "add_centre";
    case MoveKind::RemoveCentre: return "remove_centre";
    case MoveKind::AddCovariate: return "add_covariate";
    case MoveKind::RemoveCovariate: return "remove_covariate";
    case MoveKind::SwapCovariate: return "swap_covariate";
    case MoveKind::MoveCentre: return "move_centre";
  }
  return "unknown";
}

MoveKind reverse_move(MoveKind move) {
  switch (move) {
    case MoveKind::AddCentre: return MoveKind::RemoveCentre;
    case MoveKind::RemoveCentre: return MoveKind::AddCentre;
    case MoveKind::AddCovariate: return MoveKind::RemoveCovariate;
    case MoveKind::RemoveCovariate: return MoveKind::AddCovariate;
    case MoveKind::SwapCovariate: return MoveKind::SwapCovariate;
    case MoveKind::MoveCentre: return MoveKind::MoveCentre;
  }
  return move;
}

MoveKind draw_move(Random& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < kMoveCount; ++i) {
    cumulative += kMoveProbabilities[i];
    if (u < cumulative) return static_cast<MoveKind>(i);
  }
  return static_cast<MoveKind>(kMoveCount - 1);
}

double log_move_density(MoveKind move, const Tessellation& from, const Tessellation& to, const StructurePrior& prior) {
  auto require = [](bool ok) {
    if (!ok) throw StructuralError("tessellations are not related by the given move");
  };
  switch (move) {
    case MoveKind::AddCentre: {
      require(from.dims == to.dims && to.centre_count() == from.centre_count() + 1);
      return density_add_centre(prior, from, to.centre(first_difference(from, to)));
    }
    case MoveKind::RemoveCentre:
      require(from.dims == to.dims && from.centre_count() == to.centre_count() + 1);
      return density_remove_centre(from);
    case MoveKind::AddCovariate: {
      require(to.dimension() == from.dimension() + 1 && to.centre_count() == from.centre_count());
      const std::size_t slot = extra_dimension_slot(to, from);
      return density_add_covariate(prior, from, column_log_density(prior, to, slot));
    }
    case MoveKind::RemoveCovariate:
      require(from.dimension() == to.dimension() + 1 && to.centre_count() == from.centre_count());
      return density_remove_covariate(from);
    case MoveKind::SwapCovariate: {
      require(from.dimension() == to.dimension() && from.dims != to.dims);
      const std::size_t slot = extra_dimension_slot(to, from);
      return density_swap_covariate(prior, from, column_log_density(prior, to, slot));
    }
    case MoveKind::MoveCentre: {
      require(from.dims == to.dims && from.centre_count() == to.centre_count());
      const std::size_t slot = std::min(first_difference(from, to), from.centre_count() - 1);
      return density_move_centre(prior, from, from.centre(slot), to.centre(slot));
    }
  }
  throw StructuralError("unknown move");
}

std::optional<Proposal> propose(const Tessellation& t, const StructurePrior& prior, MoveKind move, Random& rng) {
  switch (move) {
    case MoveKind::AddCentre: return propose_add_centre(t, prior, rng);
    case MoveKind::RemoveCentre: return propose_remove_centre(t, prior, rng);
    case MoveKind::AddCovariate: return propose_add_covariate(t, prior, rng);
    case MoveKind::RemoveCovariate: return propose_remove_covariate(t, prior, rng);
    case MoveKind::SwapCovariate: return propose_swap_covariate(t, prior, rng);
    case MoveKind::MoveCentre: return propose_move_centre(t, prior, rng);
  }
  return std::nullopt;
}

std::optional<Proposal> propose(const Tessellation& t, const StructurePrior& prior, Random& rng) {
  return propose(t, prior, draw_move(rng), rng);
}

double log_acceptance_ratio(double log_lik_current, double log_lik_candidate, const Proposal& proposal) {
  return (log_lik_candidate - log_lik_current) + proposal.log_prior_delta - proposal.log_forward_minus_reverse;
}

MhKernel::MhKernel(const StructurePrior& prior, double sigma_mu, LikelihoodMode mode)
    : prior_(&prior), sigma_mu_(sigma_mu), mode_(mode) {}

StepResult MhKernel::step(Tessellation& t, std::vector<std::uint32_t>& cell_of_row,
                          std::span<const double> residuals, Random& rng) {
  const MoveKind move = draw_move(rng);
  return apply(t, cell_of_row, residuals, propose(t, *prior_, move, rng), move, rng);
}

StepResult MhKernel::step(Tessellation& t, std::vector<std::uint32_t>& cell_of_row,
                          std::span<const double> residuals, MoveKind move, Random& rng) {
  return apply(t, cell_of_row, residuals, propose(t, *prior_, move, rng), move, rng);
}

StepResult MhKernel::apply(Tessellation& t, std::vector<std::uint32_t>& cell_of_row,
                           std::span<const double> residuals, std::optional<Proposal> proposal, MoveKind move,
                           Random& rng) {
  StepResult result;
  result.move = move;
  if (!proposal) {
    result.noop = true;
    return result;
  }
  const auto& x = prior_->covariates();
  const bool track_cells = !cell_of_row.empty();
  double ll_current = 0.0;
  double ll_candidate = 0.0;
  if (mode_ == LikelihoodMode::Integrated) {
    ll_current = log_marginal_likelihood(cell_stats(cell_of_row, t.centre_count(), residuals), sigma_mu_);
    if (cell_of_row.size() != x.rows()) throw StructuralError("cell assignment does not match row count");
    candidate_cells_.resize(x.rows());
    switch (proposal->move) {
      case MoveKind::AddCentre:
        reassign_rows(proposal->candidate, x, CentreChange::Inserted, proposal->slot, cell_of_row, candidate_cells_);
        break;
      case MoveKind::RemoveCentre:
        reassign_rows(proposal->candidate, x, CentreChange::Removed, proposal->slot, cell_of_row, candidate_cells_);
        break;
      case MoveKind::MoveCentre:
        reassign_rows(proposal->candidate, x, CentreChange::Moved, proposal->slot, cell_of_row, candidate_cells_);
        break;
      default:
        assign_rows(proposal->candidate, x, candidate_cells_, scratch_);
    }
    ll_candidate =
        log_marginal_likelihood(cell_stats(candidate_cells_, proposal->candidate.centre_count(), residuals), sigma_mu_);
  }
  result.log_ratio = log_acceptance_ratio(ll_current, ll_candidate, *proposal);
  if (std::isnan(result.log_ratio) || result.log_ratio == std::numeric_limits<double>::infinity()) {
    std::ostringstream msg;
    msg << "non-finite Metropolis-Hastings ratio for move " << move_name(move) << ": log-lik current "
        << ll_current << ", candidate " << ll_candidate << ", prior delta " << proposal->log_prior_delta
        << ", proposal term " << proposal->log_forward_minus_reverse;
    throw NumericError(msg.str());
  }
  const double log_u = std::log(rng.uniform_open());
  if (log_u < result.log_ratio) {
    result.accepted = true;
    t = std::move(proposal->candidate);
    if (track_cells) {
      if (mode_ == LikelihoodMode::Integrated) {
        cell_of_row.swap(candidate_cells_);
      } else {
        assign_rows(t, x, cell_of_row, scratch_);
      }
    }
  }
  return result;
}

MhOutcome mh_step(const Tessellation& t, std::span<const double> residuals, const StructurePrior& prior,
                  double sigma_mu, Random& rng, LikelihoodMode mode) {
  MhKernel kernel(prior, sigma_mu, mode);
  auto cells = assign_rows(t, prior.covariates());
  Tessellation out = t;
  const auto result = kernel.step(out, cells, residuals, rng);
  return {std::move(out), result.accepted};
}

}  // namespace addivortes
