#include "curriculum/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace curriculum {

SyntheticLearner::SyntheticLearner(SyntheticLearnerConfig config)
    : config_(config), rng_(config.seed) {
  if (config_.k < 1) throw std::invalid_argument("synthetic learner: k must be >= 1");
  if (!(config_.eta > 0.0 && config_.eta <= 1.0)) {
    throw std::invalid_argument("synthetic learner: eta must be in (0, 1]");
  }
  if (!(config_.init_p >= 0.0 && config_.init_p <= 1.0)) {
    throw std::invalid_argument("synthetic learner: init_p must be in [0, 1]");
  }
  if (!(config_.noise_sigma >= 0.0) || !std::isfinite(config_.noise_sigma)) {
    throw std::invalid_argument("synthetic learner: noise_sigma must be >= 0");
  }
  proficiency_.assign(config_.k, config_.init_p);
}

void SyntheticLearner::set_proficiency(std::vector<double> p) {
  if (p.size() != config_.k) throw std::invalid_argument("proficiency size != k");
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("proficiency outside [0, 1]");
  }
  proficiency_ = std::move(p);
}

void SyntheticLearner::check_task(std::size_t task) const {
  if (task >= config_.k) {
    throw std::invalid_argument("task " + std::to_string(task) + " out of range for k=" +
                                std::to_string(config_.k));
  }
}

double SyntheticLearner::gate(std::size_t task) const {
  double g = 1.0;
  for (std::size_t j = 0; j < task; ++j) g *= proficiency_[j];
  return g;
}

double SyntheticLearner::observe(double loss) {
  if (config_.noise_sigma == 0.0) return loss;
  return std::max(0.0, loss + config_.noise_sigma * rng_.normal());
}

LearnerReport SyntheticLearner::train(std::size_t task, std::span<const std::string> batch) {
  check_task(task);
  double& p = proficiency_[task];
  const double before = 1.0 - p;
  p = std::clamp(p + config_.eta * (1.0 - p) * gate(task), 0.0, 1.0);
  const double after = 1.0 - p;
  LearnerReport report;
  report.loss_before = observe(before);
  report.loss_after = observe(after);
  report.step_cost = static_cast<double>(std::max<std::size_t>(batch.size(), 1));
  return report;
}

double SyntheticLearner::eval(std::size_t task, std::span<const std::string>) {
  check_task(task);
  return observe(1.0 - proficiency_[task]);
}

double SyntheticLearner::validation_loss() {
  double total = 0.0;
  for (double p : proficiency_) total += 1.0 - p;
  return total / static_cast<double>(proficiency_.size());
}

}  // namespace curriculum
