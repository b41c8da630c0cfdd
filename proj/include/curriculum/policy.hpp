#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "curriculum/random.hpp"

namespace curriculum {

enum class PolicyKind { ucb1, exp3, random, sequential };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

// Bandit bookkeeping for one run. Only the fields belonging to `kind` are
// meaningful; the others stay at their defaults.
struct PolicyState {
  PolicyKind kind = PolicyKind::ucb1;
  std::size_t k = 0;
  // Number of updates so far, forced initialization pulls included.
  std::uint64_t t = 0;

  std::vector<std::uint64_t> counts;  // ucb1: n(a)
  std::vector<double> values;         // ucb1: running mean reward q(a)
  std::vector<double> weights;        // exp3: w_i, all > 0
  double c = 0.5;                     // ucb1 exploration constant
  double gamma = 0.01;                // exp3 exploration probability

  std::vector<bool> masked;  // arm exhausted for the current epoch
  std::size_t cursor = 0;    // sequential: task currently being trained

  std::size_t unmasked_count() const;
};

PolicyState make_policy(PolicyKind kind, std::size_t k, double c = 0.5,
                        double gamma = 0.01);

// Unpulled unmasked arms first (lowest index), then argmax of
// q(a) + c*sqrt(ln t / n(a)); ties go to the lowest index.
std::size_t ucb1_select(const PolicyState& state);
void ucb1_update(PolicyState& state, std::size_t arm, double reward);

// Full-length vector; masked arms get probability 0 and the m unmasked arms
// get (1-gamma)*w_i/sum(w) + gamma/m, the sum taken over unmasked arms.
std::vector<double> exp3_distribution(const PolicyState& state);
std::size_t exp3_select(const PolicyState& state, Rng& rng);
// reward is in [-1, 1] and is mapped to (reward+1)/2 before the
// importance-weighted exponential update.
void exp3_update(PolicyState& state, std::size_t arm, double reward,
                 double prob_used);

std::size_t random_select(const PolicyState& state, Rng& rng);
std::size_t sequential_select(const PolicyState& state);

void mask_arm(PolicyState& state, std::size_t arm);
void reset_masks(PolicyState& state);

struct Selection {
  std::size_t arm = 0;
  // Probability with which `arm` was chosen (1 for deterministic choices).
  double probability = 1.0;
};

// Kind-dispatching front end used by the scheduler.
Selection select_arm(const PolicyState& state, Rng& rng);
void update_policy(PolicyState& state, const Selection& selection,
                   double reward);

// q(a) for ucb1, normalized weights for exp3, empty otherwise.
std::vector<double> policy_snapshot(const PolicyState& state);

}  // namespace curriculum
