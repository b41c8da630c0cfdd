#include "curriculum/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace curriculum {

namespace {

constexpr double kWeightCeiling = 1e100;

void require_kind(const PolicyState& state, PolicyKind kind, const char* op) {
  if (state.kind != kind) {
    throw std::invalid_argument(std::string(op) + " called on a " +
                                std::string(to_string(state.kind)) + " policy");
  }
}

void require_arm(const PolicyState& state, std::size_t arm) {
  if (arm >= state.k) {
    throw std::invalid_argument("arm " + std::to_string(arm) + " out of range for k=" +
                                std::to_string(state.k));
  }
}

void require_available(const PolicyState& state) {
  if (state.unmasked_count() == 0) throw std::runtime_error("no arms available");
}

void require_reward(double reward) {
  if (!(reward >= -1.0 && reward <= 1.0)) {
    throw std::invalid_argument("reward " + std::to_string(reward) + " outside [-1, 1]");
  }
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ucb1: return "ucb1";
    case PolicyKind::exp3: return "exp3";
    case PolicyKind::random: return "random";
    case PolicyKind::sequential: return "sequential";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "ucb1") return PolicyKind::ucb1;
  if (name == "exp3") return PolicyKind::exp3;
  if (name == "random") return PolicyKind::random;
  if (name == "sequential") return PolicyKind::sequential;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

std::size_t PolicyState::unmasked_count() const {
  return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), false));
}

PolicyState make_policy(PolicyKind kind, std::size_t k, double c, double gamma) {
  if (k < 1) throw std::invalid_argument("policy needs at least one arm");
  PolicyState s;
  s.kind = kind;
  s.k = k;
  s.masked.assign(k, false);
  switch (kind) {
    case PolicyKind::ucb1:
      if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("ucb1: c must be >= 0");
      s.c = c;
      s.counts.assign(k, 0);
      s.values.assign(k, 0.0);
      break;
    case PolicyKind::exp3:
      if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("exp3: gamma must be in (0, 1]");
      }
      s.gamma = gamma;
      s.weights.assign(k, 1.0);
      break;
    case PolicyKind::random:
    case PolicyKind::sequential:
      break;
  }
  return s;
}

std::size_t ucb1_select(const PolicyState& state) {
  require_kind(state, PolicyKind::ucb1, "ucb1_select");
  require_available(state);
  for (std::size_t a = 0; a < state.k; ++a) {
    if (!state.masked[a] && state.counts[a] == 0) return a;
  }
  const double log_t = std::log(static_cast<double>(std::max<std::uint64_t>(state.t, 1)));
  std::size_t best = state.k;
  double best_score = 0.0;
  for (std::size_t a = 0; a < state.k; ++a) {
    if (state.masked[a]) continue;
    const double score =
        state.values[a] + state.c * std::sqrt(log_t / static_cast<double>(state.counts[a]));
    if (best == state.k || score > best_score) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

void ucb1_update(PolicyState& state, std::size_t arm, double reward) {
  require_kind(state, PolicyKind::ucb1, "ucb1_update");
  require_arm(state, arm);
  require_reward(reward);
  state.counts[arm] += 1;
  state.values[arm] += (reward - state.values[arm]) / static_cast<double>(state.counts[arm]);
  state.t += 1;
}

std::vector<double> exp3_distribution(const PolicyState& state) {
  require_kind(state, PolicyKind::exp3, "exp3_distribution");
  require_available(state);
  const double m = static_cast<double>(state.unmasked_count());
  double total = 0.0;
  for (std::size_t a = 0; a < state.k; ++a) {
    if (!state.masked[a]) total += state.weights[a];
  }
  std::vector<double> p(state.k, 0.0);
  for (std::size_t a = 0; a < state.k; ++a) {
    if (state.masked[a]) continue;
    // Same mixture as (1-g)x + g/m, but exact when x == 1/m.
    const double x = state.weights[a] / total;
    p[a] = x - state.gamma * (x - 1.0 / m);
  }
  return p;
}

std::size_t exp3_select(const PolicyState& state, Rng& rng) {
  const auto p = exp3_distribution(state);
  return rng.discrete(p);
}

void exp3_update(PolicyState& state, std::size_t arm, double reward, double prob_used) {
  require_kind(state, PolicyKind::exp3, "exp3_update");
  require_arm(state, arm);
  require_reward(reward);
  if (!(prob_used > 0.0)) throw std::invalid_argument("exp3_update: prob_used must be > 0");
  const std::size_t m = std::max<std::size_t>(state.unmasked_count(), 1);
  const double scaled = (reward + 1.0) / 2.0;
  const double estimate = scaled / prob_used;
  state.weights[arm] *= std::exp(state.gamma * estimate / static_cast<double>(m));

  const double max_w = *std::max_element(state.weights.begin(), state.weights.end());
  if (max_w > kWeightCeiling) {
    for (double& w : state.weights) w /= max_w;
  }
  state.t += 1;
}

std::size_t random_select(const PolicyState& state, Rng& rng) {
  require_available(state);
  std::size_t pick = rng.uniform_index(state.unmasked_count());
  for (std::size_t a = 0; a < state.k; ++a) {
    if (state.masked[a]) continue;
    if (pick == 0) return a;
    --pick;
  }
  return state.k;  // unreachable
}

std::size_t sequential_select(const PolicyState& state) {
  require_available(state);
  for (std::size_t a = 0; a < state.k; ++a) {
    if (!state.masked[a]) return a;
  }
  return state.k;  // unreachable
}

void mask_arm(PolicyState& state, std::size_t arm) {
  require_arm(state, arm);
  state.masked[arm] = true;
}

void reset_masks(PolicyState& state) { std::fill(state.masked.begin(), state.masked.end(), false); }

Selection select_arm(const PolicyState& state, Rng& rng) {
  switch (state.kind) {
    case PolicyKind::ucb1:
      return {ucb1_select(state), 1.0};
    case PolicyKind::exp3: {
      const auto p = exp3_distribution(state);
      const std::size_t arm = rng.discrete(p);
      return {arm, p[arm]};
    }
    case PolicyKind::random: {
      const std::size_t arm = random_select(state, rng);
      return {arm, 1.0 / static_cast<double>(state.unmasked_count())};
    }
    case PolicyKind::sequential:
      return {sequential_select(state), 1.0};
  }
  throw std::logic_error("unhandled policy kind");
}

void update_policy(PolicyState& state, const Selection& selection, double reward) {
  switch (state.kind) {
    case PolicyKind::ucb1:
      ucb1_update(state, selection.arm, reward);
      return;
    case PolicyKind::exp3:
      exp3_update(state, selection.arm, reward, selection.probability);
      return;
    case PolicyKind::random:
    case PolicyKind::sequential:
      require_arm(state, selection.arm);
      require_reward(reward);
      state.cursor = selection.arm;
      state.t += 1;
      return;
  }
}

std::vector<double> policy_snapshot(const PolicyState& state) {
  switch (state.kind) {
    case PolicyKind::ucb1:
      return state.values;
    case PolicyKind::exp3: {
      const double total = std::accumulate(state.weights.begin(), state.weights.end(), 0.0);
      std::vector<double> out(state.weights.size());
      for (std::size_t a = 0; a < out.size(); ++a) out[a] = state.weights[a] / total;
      return out;
    }
    default:
      return {};
  }
}

}  // namespace curriculum
