#include "curriculum/scheduler.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "curriculum/external_learner.hpp"

namespace curriculum {

namespace {

// Independent random streams derived from the run seed.
constexpr std::uint64_t kPolicyStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kEvalStream = 3;
constexpr std::uint64_t kLearnerStream = 4;

std::vector<std::string> draw_fresh_batch(const std::vector<std::string>& task,
                                          std::size_t batch_size, Rng& rng) {
  // Partial Fisher-Yates over indices: batch_size distinct ids.
  std::vector<std::size_t> index(task.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  const std::size_t n = std::min(batch_size, task.size());
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_index(index.size() - i);
    std::swap(index[i], index[j]);
    out.push_back(task[index[i]]);
  }
  return out;
}

}  // namespace

std::string_view to_string(GainKind kind) { return kind == GainKind::pg ? "pg" : "spg"; }

GainKind parse_gain_kind(std::string_view name) {
  if (name == "pg") return GainKind::pg;
  if (name == "spg") return GainKind::spg;
  throw std::invalid_argument("unknown gain '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (policy == PolicyKind::ucb1 && (!(c >= 0.0) || !std::isfinite(c))) {
    throw std::invalid_argument("c must be a finite value >= 0");
  }
  if (policy == PolicyKind::exp3 && !(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must be in (0, 1]");
  }
  if (history_capacity && *history_capacity == 0) {
    throw std::invalid_argument("history capacity must be >= 1");
  }
  if (learner == "synthetic") {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in (0, 1]");
    if (!(init_p >= 0.0 && init_p <= 1.0)) throw std::invalid_argument("init_p must be in [0, 1]");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
      throw std::invalid_argument("noise_sigma must be >= 0");
    }
  } else if (learner == "external") {
    if (learner_cmd.empty()) throw std::invalid_argument("external learner needs a command");
    if (!(learner_timeout_s > 0.0)) throw std::invalid_argument("learner timeout must be > 0");
  } else {
    throw std::invalid_argument("unknown learner '" + learner + "'");
  }
}

std::vector<std::size_t> batch_budgets(const TaskSet& tasks, std::size_t batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<std::size_t> budgets;
  budgets.reserve(tasks.tasks.size());
  for (const auto& task : tasks.tasks) {
    budgets.push_back((task.size() + batch_size - 1) / batch_size);
  }
  return budgets;
}

double compute_gain(GainKind kind, const LearnerReport& report, Learner& learner,
                    std::size_t task, std::span<const std::string> fresh_batch,
                    std::optional<double>* eval_loss) {
  if (kind == GainKind::pg) return prediction_gain(report.loss_before, report.loss_after);
  const double after = learner.eval(task, fresh_batch);
  if (eval_loss) *eval_loss = after;
  return self_prediction_gain(report.loss_before, after);
}

std::unique_ptr<Learner> make_learner(const RunConfig& config) {
  config.validate();
  if (config.learner == "external") {
    ExternalLearnerOptions options;
    options.command = config.learner_cmd;
    options.timeout = std::chrono::milliseconds(
        static_cast<std::int64_t>(std::llround(config.learner_timeout_s * 1000.0)));
    return std::make_unique<ExternalLearner>(std::move(options));
  }
  SyntheticLearnerConfig sc;
  sc.k = config.k;
  sc.eta = config.eta;
  sc.init_p = config.init_p;
  sc.noise_sigma = config.noise_sigma;
  sc.seed = mix_seed(config.seed, kLearnerStream);
  return std::make_unique<SyntheticLearner>(sc);
}

std::vector<TraceEvent> run_curriculum(const RunConfig& config, const TaskSet& tasks,
                                       Learner& learner, const TraceSink& sink) {
  config.validate();
  if (tasks.k != config.k || tasks.tasks.size() != config.k) {
    throw std::invalid_argument("config k=" + std::to_string(config.k) +
                                " does not match task set k=" + std::to_string(tasks.tasks.size()));
  }
  for (std::size_t i = 0; i < tasks.tasks.size(); ++i) {
    if (tasks.tasks[i].empty()) {
      throw std::invalid_argument("task " + std::to_string(i) + " is empty");
    }
  }

  PolicyState policy = make_policy(config.policy, config.k, config.c, config.gamma);
  Rng policy_rng(mix_seed(config.seed, kPolicyStream));
  GainHistory history(config.history_capacity);
  std::vector<TraceEvent> trace;
  std::uint64_t t = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    reset_masks(policy);
    std::vector<std::size_t> budgets = batch_budgets(tasks, config.batch_size);

    // Each task is reshuffled per epoch and consumed front to back, which
    // makes the draw uniform without replacement within the epoch.
    Rng sample_rng(mix_seed(mix_seed(config.seed, kSampleStream), epoch));
    Rng eval_rng(mix_seed(mix_seed(config.seed, kEvalStream), epoch));
    std::vector<std::vector<std::string>> order = tasks.tasks;
    for (auto& task : order) sample_rng.shuffle(task);
    std::vector<std::size_t> consumed(config.k, 0);

    while (policy.unmasked_count() > 0) {
      TraceEvent ev;
      for (std::size_t a = 0; a < config.k; ++a) {
        if (!policy.masked[a]) ev.available.push_back(a);
      }
      const Selection sel = select_arm(policy, policy_rng);
      const std::size_t arm = sel.arm;

      const auto& pool = order[arm];
      const std::size_t take = std::min(config.batch_size, pool.size() - consumed[arm]);
      ev.batch.assign(pool.begin() + static_cast<std::ptrdiff_t>(consumed[arm]),
                      pool.begin() + static_cast<std::ptrdiff_t>(consumed[arm] + take));
      consumed[arm] += take;

      const LearnerReport report = learner.train(arm, ev.batch);
      std::vector<std::string> fresh;
      if (config.gain == GainKind::spg) {
        fresh = draw_fresh_batch(tasks.tasks[arm], config.batch_size, eval_rng);
      }
      ev.raw_gain = compute_gain(config.gain, report, learner, arm, fresh, &ev.loss_eval);

      const MappedReward mapped = map_reward(ev.raw_gain, history, config.warmup);
      update_policy(policy, sel, mapped.reward);
      history.append(ev.raw_gain);

      if (--budgets[arm] == 0) mask_arm(policy, arm);
      ++t;

      ev.t = t;
      ev.epoch = epoch;
      ev.arm = arm;
      ev.probability = sel.probability;
      ev.loss_before = report.loss_before;
      ev.loss_after = report.loss_after;
      ev.q_lo = mapped.q_lo;
      ev.q_hi = mapped.q_hi;
      ev.reward = mapped.reward;
      ev.policy_snapshot = policy_snapshot(policy);
      const bool epoch_end = policy.unmasked_count() == 0;
      if (epoch_end || (config.validate_every > 0 && t % config.validate_every == 0)) {
        ev.validation_loss = learner.validation_loss();
      }
      if (sink) sink(ev);
      trace.push_back(std::move(ev));
    }
  }
  return trace;
}

}  // namespace curriculum
