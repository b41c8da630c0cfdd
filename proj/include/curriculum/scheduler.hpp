#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curriculum/corpus.hpp"
#include "curriculum/learner.hpp"
#include "curriculum/policy.hpp"
#include "curriculum/reward.hpp"

namespace curriculum {

enum class GainKind { pg, spg };

std::string_view to_string(GainKind kind);
GainKind parse_gain_kind(std::string_view name);

struct RunConfig {
  PolicyKind policy = PolicyKind::ucb1;
  double c = 0.5;
  double gamma = 0.01;
  GainKind gain = GainKind::pg;
  std::size_t k = 5;
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  std::size_t warmup = kDefaultWarmup;
  std::optional<std::size_t> history_capacity;
  // Also record validation loss every this many steps; 0 means only at
  // epoch ends.
  std::size_t validate_every = 0;

  // "synthetic" or "external"; parameters of the unused kind are ignored.
  std::string learner = "synthetic";
  double eta = 0.2;
  double init_p = 0.05;
  double noise_sigma = 0.0;
  std::string learner_cmd;
  double learner_timeout_s = 600.0;

  // Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

struct TraceEvent {
  std::uint64_t t = 0;  // 1-based global step
  std::size_t epoch = 0;
  std::size_t arm = 0;
  double probability = 1.0;
  // Arms that were selectable when `arm` was chosen.
  std::vector<std::size_t> available;
  std::vector<std::string> batch;
  double loss_before = 0.0;
  double loss_after = 0.0;
  // Second loss of the self-prediction gain (fresh batch, same task).
  std::optional<double> loss_eval;
  double raw_gain = 0.0;
  std::optional<double> q_lo;
  std::optional<double> q_hi;
  double reward = 0.0;
  std::optional<double> validation_loss;
  std::vector<double> policy_snapshot;
};

using TraceSink = std::function<void(const TraceEvent&)>;

// Synthetic learner seeded from the run seed, or an external trainer
// subprocess, depending on config.learner.
std::unique_ptr<Learner> make_learner(const RunConfig& config);

// Per-task batch budget for one epoch: ceil(|D_k| / batch_size).
std::vector<std::size_t> batch_budgets(const TaskSet& tasks,
                                       std::size_t batch_size);

// Raw progress gain of one training step. For spg the learner is asked for
// the loss on `fresh_batch`, which must come from `task`.
double compute_gain(GainKind kind, const LearnerReport& report,
                    Learner& learner, std::size_t task,
                    std::span<const std::string> fresh_batch,
                    std::optional<double>* eval_loss = nullptr);

// Runs the epoch loop. Every event is passed to `sink` (if any) as soon as
// it is complete, so a learner failure mid-run leaves the earlier events
// written out before the exception propagates.
std::vector<TraceEvent> run_curriculum(const RunConfig& config,
                                       const TaskSet& tasks, Learner& learner,
                                       const TraceSink& sink = {});

}  // namespace curriculum
