#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "curriculum/trace_io.hpp"

namespace curriculum {

struct ReportSummary {
  std::string name;
  std::size_t k = 0;
  // (t, validation loss) wherever the trace recorded one.
  std::vector<std::pair<std::uint64_t, double>> validation_curve;
  // cumulative_reward[i] = sum of rewards of events 0..i.
  std::vector<double> cumulative_reward;
  // action_histogram[epoch][arm] = steps spent on arm during epoch.
  std::vector<std::vector<std::size_t>> action_histogram;
  // actions[epoch] = arm sequence of that epoch.
  std::vector<std::vector<std::size_t>> actions;
  // threshold -> first t whose validation loss is <= threshold.
  std::map<double, std::optional<std::uint64_t>> steps_to_threshold;
};

ReportSummary summarize(const std::string& name, const Trace& trace,
                        std::span<const double> thresholds);

nlohmann::json summary_to_json(const ReportSummary& summary,
                               const RunConfig& config);

struct NamedTrace {
  std::string name;
  Trace trace;
};

// Writes validation_loss.csv, cumulative_reward.csv, actions_epoch<N>.csv
// (N 0-based) and summary.json into out_dir. Runs become columns, joined on
// step index. Throws std::invalid_argument if the traces disagree on K.
void write_report(std::span<const NamedTrace> runs,
                  const std::filesystem::path& out_dir,
                  std::span<const double> thresholds);

// Column name for a trace file: its file name minus ".trace.jsonl".
std::string run_name_from_path(const std::filesystem::path& path);

}  // namespace curriculum
