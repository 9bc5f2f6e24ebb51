#ifndef ADDIVORTES_MOVES_HPP
#define ADDIVORTES_MOVES_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "addivortes/priors.hpp"
#include "addivortes/random.hpp"
#include "addivortes/tessellation.hpp"

namespace addivortes {

enum class MoveKind : std::uint8_t {
  AddCentre = 0,
  RemoveCentre,
  AddCovariate,
  RemoveCovariate,
  SwapCovariate,
  MoveCentre,
};

inline constexpr std::size_t kMoveCount = 6;
inline constexpr std::array<double, kMoveCount> kMoveProbabilities{0.2, 0.2, 0.2, 0.2, 0.1, 0.1};

std::string_view move_name(MoveKind move);
MoveKind reverse_move(MoveKind move);
MoveKind draw_move(Random& rng);

struct Proposal {
  MoveKind move;
  Tessellation candidate;
  // log q(candidate | current) - log q(current | candidate)
  double log_forward_minus_reverse = 0.0;
  // log prior(candidate) - log prior(current), from the factors that changed
  double log_prior_delta = 0.0;
  // centre inserted, removed or moved (centre moves only)
  std::size_t slot = 0;
};

// Log density of proposing `to` from `from` with the given move, including
// the move-selection probability. Both directions of a reversible pair go
// through this function.
double log_move_density(MoveKind move, const Tessellation& from, const Tessellation& to,
                        const StructurePrior& prior);

// Draws a move and builds its candidate. std::nullopt means the move is
// impossible in the current state (or kept producing duplicate centres).
std::optional<Proposal> propose(const Tessellation& t, const StructurePrior& prior, Random& rng);
std::optional<Proposal> propose(const Tessellation& t, const StructurePrior& prior, MoveKind move, Random& rng);

enum class LikelihoodMode { Integrated, PriorOnly };

struct StepResult {
  MoveKind move = MoveKind::AddCentre;
  bool noop = false;
  bool accepted = false;
  double log_ratio = 0.0;
};

// Log Metropolis-Hastings ratio for a proposal, given the integrated
// likelihoods of the current and candidate partitions.
double log_acceptance_ratio(double log_lik_current, double log_lik_candidate, const Proposal& proposal);

// Metropolis-Hastings update of one tessellation structure against partial
// residuals. Reuses the caller's cached cell assignment of the current
// structure and updates it on acceptance.
class MhKernel {
 public:
  MhKernel(const StructurePrior& prior, double sigma_mu, LikelihoodMode mode = LikelihoodMode::Integrated);

  StepResult step(Tessellation& t, std::vector<std::uint32_t>& cell_of_row, std::span<const double> residuals,
                  Random& rng);
  // Same, with the move fixed instead of drawn.
  StepResult step(Tessellation& t, std::vector<std::uint32_t>& cell_of_row, std::span<const double> residuals,
                  MoveKind move, Random& rng);
  StepResult apply(Tessellation& t, std::vector<std::uint32_t>& cell_of_row, std::span<const double> residuals,
                   std::optional<Proposal> proposal, MoveKind move, Random& rng);

  double sigma_mu() const { return sigma_mu_; }

 private:
  const StructurePrior* prior_;
  double sigma_mu_;
  LikelihoodMode mode_;
  std::vector<std::uint32_t> candidate_cells_;
  std::vector<double> scratch_;
};

struct MhOutcome {
  Tessellation structure;
  bool accepted;
};

// Stateless form: recomputes both partitions from scratch.
MhOutcome mh_step(const Tessellation& t, std::span<const double> residuals, const StructurePrior& prior,
                  double sigma_mu, Random& rng, LikelihoodMode mode = LikelihoodMode::Integrated);

}  // namespace addivortes

#endif
