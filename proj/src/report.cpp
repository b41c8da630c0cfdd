#include "curriculum/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>

#include "curriculum/error.hpp"

namespace curriculum {

using nlohmann::json;

namespace {

// Shortest round-trip form, always with '.' as decimal separator.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_header(std::ostream& out, const std::string& first, std::span<const NamedTrace> runs) {
  out << first;
  for (const auto& run : runs) out << ',' << run.name;
  out << '\n';
}

}  // namespace

ReportSummary summarize(const std::string& name, const Trace& trace,
                        std::span<const double> thresholds) {
  ReportSummary s;
  s.name = name;
  s.k = trace.config.k;
  double running = 0.0;
  s.cumulative_reward.reserve(trace.events.size());
  for (const auto& e : trace.events) {
    running += e.reward;
    s.cumulative_reward.push_back(running);
    if (e.validation_loss) s.validation_curve.emplace_back(e.t, *e.validation_loss);
    if (e.arm >= s.k) throw ParseError("trace event arm " + std::to_string(e.arm) + " >= k");
    if (s.actions.size() <= e.epoch) {
      s.actions.resize(e.epoch + 1);
      s.action_histogram.resize(e.epoch + 1, std::vector<std::size_t>(s.k, 0));
    }
    s.actions[e.epoch].push_back(e.arm);
    s.action_histogram[e.epoch][e.arm] += 1;
  }
  for (double threshold : thresholds) {
    std::optional<std::uint64_t> hit;
    for (const auto& [t, loss] : s.validation_curve) {
      if (loss <= threshold) {
        hit = t;
        break;
      }
    }
    s.steps_to_threshold[threshold] = hit;
  }
  return s;
}

json summary_to_json(const ReportSummary& s, const RunConfig& config) {
  json j;
  j["name"] = s.name;
  j["config"] = config_to_json(config);
  j["steps"] = s.cumulative_reward.size();
  j["epochs"] = s.actions.size();
  j["final_cumulative_reward"] = s.cumulative_reward.empty() ? 0.0 : s.cumulative_reward.back();
  j["final_validation_loss"] =
      s.validation_curve.empty() ? json(nullptr) : json(s.validation_curve.back().second);
  json thresholds = json::array();
  for (const auto& [threshold, hit] : s.steps_to_threshold) {
    thresholds.push_back({{"threshold", threshold}, {"steps", hit ? json(*hit) : json(nullptr)}});
  }
  j["steps_to_threshold"] = thresholds;
  j["action_histogram"] = s.action_histogram;
  j["final_epoch_actions"] = s.actions.empty() ? std::vector<std::size_t>{} : s.actions.back();
  return j;
}

std::string run_name_from_path(const std::filesystem::path& path) {
  std::string name = path.filename().string();
  for (const std::string suffix : {".trace.jsonl", ".jsonl"}) {
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
      name.resize(name.size() - suffix.size());
      break;
    }
  }
  return name;
}

void write_report(std::span<const NamedTrace> runs, const std::filesystem::path& out_dir,
                  std::span<const double> thresholds) {
  if (runs.empty()) throw std::invalid_argument("report needs at least one trace");
  const std::size_t k = runs.front().trace.config.k;
  for (const auto& run : runs) {
    if (run.trace.config.k != k) {
      throw std::invalid_argument("traces disagree on K: " + runs.front().name + " has " +
                                  std::to_string(k) + ", " + run.name + " has " +
                                  std::to_string(run.trace.config.k));
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<ReportSummary> summaries;
  for (const auto& run : runs) summaries.push_back(summarize(run.name, run.trace, thresholds));

  {
    std::set<std::uint64_t> steps;
    for (const auto& s : summaries) {
      for (const auto& point : s.validation_curve) steps.insert(point.first);
    }
    auto out = open_csv(out_dir / "validation_loss.csv");
    write_header(out, "step", runs);
    std::vector<std::size_t> cursor(summaries.size(), 0);
    for (std::uint64_t t : steps) {
      out << t;
      for (std::size_t r = 0; r < summaries.size(); ++r) {
        out << ',';
        const auto& curve = summaries[r].validation_curve;
        if (cursor[r] < curve.size() && curve[cursor[r]].first == t) {
          out << format_double(curve[cursor[r]].second);
          ++cursor[r];
        }
      }
      out << '\n';
    }
  }

  {
    std::size_t rows = 0;
    for (const auto& s : summaries) rows = std::max(rows, s.cumulative_reward.size());
    auto out = open_csv(out_dir / "cumulative_reward.csv");
    write_header(out, "step", runs);
    for (std::size_t i = 0; i < rows; ++i) {
      out << (i + 1);
      for (const auto& s : summaries) {
        out << ',';
        if (i < s.cumulative_reward.size()) out << format_double(s.cumulative_reward[i]);
      }
      out << '\n';
    }
  }

  std::size_t epochs = 0;
  for (const auto& s : summaries) epochs = std::max(epochs, s.actions.size());
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::size_t rows = 0;
    for (const auto& s : summaries) {
      if (epoch < s.actions.size()) rows = std::max(rows, s.actions[epoch].size());
    }
    auto out = open_csv(out_dir / ("actions_epoch" + std::to_string(epoch) + ".csv"));
    write_header(out, "position", runs);
    for (std::size_t i = 0; i < rows; ++i) {
      out << i;
      for (const auto& s : summaries) {
        out << ',';
        if (epoch < s.actions.size() && i < s.actions[epoch].size()) out << s.actions[epoch][i];
      }
      out << '\n';
    }
  }

  json summary;
  summary["thresholds"] = std::vector<double>(thresholds.begin(), thresholds.end());
  summary["runs"] = json::array();
  for (std::size_t r = 0; r < summaries.size(); ++r) {
    summary["runs"].push_back(summary_to_json(summaries[r], runs[r].trace.config));
  }
  std::ofstream out(out_dir / "summary.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (out_dir / "summary.json").string());
  out << summary.dump(2) << '\n';
}

}  // namespace curriculum
