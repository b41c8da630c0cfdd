#pragma once

#include <cstddef>
#include <deque>
#include <optional>

namespace curriculum {

// Raw progress gains seen so far, oldest first. With a capacity the oldest
// values are evicted once it is reached.
class GainHistory {
 public:
  GainHistory() = default;
  explicit GainHistory(std::optional<std::size_t> capacity);

  void append(double gain);
  std::size_t size() const { return gains_.size(); }
  bool empty() const { return gains_.empty(); }
  const std::deque<double>& values() const { return gains_; }
  std::optional<std::size_t> capacity() const { return capacity_; }

 private:
  std::deque<double> gains_;
  std::optional<std::size_t> capacity_;
};

// Loss decrease on the batch that was trained on.
double prediction_gain(double loss_before, double loss_after);
// Loss before the update minus loss on a fresh batch of the same task after it.
double self_prediction_gain(double loss_before_x, double loss_after_xprime);

// Linear interpolation between order statistics at rank p*(n-1).
double quantile(const GainHistory& history, double p);

inline constexpr double kLowQuantile = 0.2;
inline constexpr double kHighQuantile = 0.8;
inline constexpr std::size_t kDefaultWarmup = 10;

struct MappedReward {
  double reward = 0.0;
  // Quantiles of the history; empty when the history is empty.
  std::optional<double> q_lo;
  std::optional<double> q_hi;
  bool warmup = false;
};

// Rescales a raw gain into [-1, 1] against the 0.2/0.8 quantiles of the
// history. Does not touch the history; the caller appends the gain after.
MappedReward map_reward(double raw_gain, const GainHistory& history,
                        std::size_t warmup = kDefaultWarmup);

}  // namespace curriculum
