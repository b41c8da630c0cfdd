#include "curriculum/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace curriculum {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

GainHistory::GainHistory(std::optional<std::size_t> capacity) : capacity_(capacity) {
  if (capacity_ && *capacity_ == 0) throw std::invalid_argument("history capacity must be > 0");
}

void GainHistory::append(double gain) {
  require_finite(gain, "gain");
  if (capacity_ && gains_.size() == *capacity_) gains_.pop_front();
  gains_.push_back(gain);
}

double prediction_gain(double loss_before, double loss_after) {
  require_finite(loss_before, "loss_before");
  require_finite(loss_after, "loss_after");
  return loss_before - loss_after;
}

double self_prediction_gain(double loss_before_x, double loss_after_xprime) {
  require_finite(loss_before_x, "loss_before_x");
  require_finite(loss_after_xprime, "loss_after_xprime");
  return loss_before_x - loss_after_xprime;
}

double quantile(const GainHistory& history, double p) {
  if (history.empty()) throw std::invalid_argument("quantile of empty history");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile p must be in [0, 1]");
  std::vector<double> sorted(history.values().begin(), history.values().end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MappedReward map_reward(double raw_gain, const GainHistory& history, std::size_t warmup) {
  require_finite(raw_gain, "raw_gain");
  MappedReward out;
  if (!history.empty()) {
    out.q_lo = quantile(history, kLowQuantile);
    out.q_hi = quantile(history, kHighQuantile);
  }
  if (history.size() < warmup) {
    out.warmup = true;
    out.reward = std::clamp(raw_gain, -1.0, 1.0);
    return out;
  }
  const double lo = *out.q_lo;
  const double hi = *out.q_hi;
  if (hi == lo) {
    // No spread in the history: neutral reward whatever the gain.
    out.reward = 0.0;
  } else if (raw_gain < lo) {
    out.reward = -1.0;
  } else if (raw_gain > hi) {
    out.reward = 1.0;
  } else {
    out.reward = std::clamp(2.0 * (raw_gain - lo) / (hi - lo) - 1.0, -1.0, 1.0);
  }
  return out;
}

}  // namespace curriculum
