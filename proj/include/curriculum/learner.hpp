#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curriculum/random.hpp"

namespace curriculum {

struct LearnerReport {
  double loss_before = 0.0;  // L(x, theta) on the batch, before the update
  double loss_after = 0.0;   // L(x, theta') on the same batch, after it
  double step_cost = 1.0;
};

// What the scheduler trains. Batches arrive as example ids drawn from one
// task; the batch size is the span length.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual LearnerReport train(std::size_t task,
                              std::span<const std::string> batch) = 0;
  // Loss on a batch without updating the model.
  virtual double eval(std::size_t task, std::span<const std::string> batch) = 0;
  virtual double validation_loss() = 0;
};

struct SyntheticLearnerConfig {
  std::size_t k = 5;
  double eta = 0.2;
  double init_p = 0.05;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

// Surrogate learner with prerequisite-gated proficiencies p_k in [0, 1].
// Task loss is 1 - p_k; training task k moves p_k toward 1 by
// eta * (1 - p_k) * prod_{j<k} p_j, so a task can only be learned once the
// easier ones have been.
class SyntheticLearner final : public Learner {
 public:
  explicit SyntheticLearner(SyntheticLearnerConfig config);

  LearnerReport train(std::size_t task,
                      std::span<const std::string> batch) override;
  double eval(std::size_t task, std::span<const std::string> batch) override;
  double validation_loss() override;

  const std::vector<double>& proficiency() const { return proficiency_; }
  void set_proficiency(std::vector<double> p);
  const SyntheticLearnerConfig& config() const { return config_; }

 private:
  double gate(std::size_t task) const;
  double observe(double loss);
  void check_task(std::size_t task) const;

  SyntheticLearnerConfig config_;
  std::vector<double> proficiency_;
  Rng rng_;
};

}  // namespace curriculum
