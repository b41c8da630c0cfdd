#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "curriculum/scheduler.hpp"

namespace curriculum {

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

nlohmann::json event_to_json(const TraceEvent& event);
TraceEvent event_from_json(const nlohmann::json& j);

// .trace.jsonl: one header line {"type":"header","config":{...}} followed by
// one {"type":"step",...} line per event.
void write_trace_header(std::ostream& out, const RunConfig& config);
void write_trace_event(std::ostream& out, const TraceEvent& event);

struct Trace {
  RunConfig config;
  std::vector<TraceEvent> events;
};

Trace read_trace(std::istream& in);
Trace read_trace(const std::filesystem::path& path);

}  // namespace curriculum
