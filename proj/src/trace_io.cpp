#include "curriculum/trace_io.hpp"

#include <fstream>
#include <string>

#include "curriculum/error.hpp"

namespace curriculum {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

json config_to_json(const RunConfig& config) {
  json j;
  j["algo"] = to_string(config.policy);
  if (config.policy == PolicyKind::ucb1) j["c"] = config.c;
  if (config.policy == PolicyKind::exp3) j["gamma"] = config.gamma;
  j["gain"] = to_string(config.gain);
  j["k"] = config.k;
  j["epochs"] = config.epochs;
  j["batch_size"] = config.batch_size;
  j["seed"] = config.seed;
  j["warmup"] = config.warmup;
  j["history_capacity"] = config.history_capacity ? json(*config.history_capacity) : json(nullptr);
  j["validate_every"] = config.validate_every;
  j["learner"] = config.learner;
  if (config.learner == "synthetic") {
    j["eta"] = config.eta;
    j["init_p"] = config.init_p;
    j["noise_sigma"] = config.noise_sigma;
  } else {
    j["learner_cmd"] = config.learner_cmd;
    j["learner_timeout_s"] = config.learner_timeout_s;
  }
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.policy = parse_policy_kind(j.at("algo").get<std::string>());
  c.c = j.value("c", c.c);
  c.gamma = j.value("gamma", c.gamma);
  c.gain = parse_gain_kind(j.at("gain").get<std::string>());
  c.k = j.at("k").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.warmup = j.value("warmup", c.warmup);
  if (j.contains("history_capacity") && !j["history_capacity"].is_null()) {
    c.history_capacity = j["history_capacity"].get<std::size_t>();
  }
  c.validate_every = j.value("validate_every", c.validate_every);
  c.learner = j.value("learner", c.learner);
  c.eta = j.value("eta", c.eta);
  c.init_p = j.value("init_p", c.init_p);
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.learner_cmd = j.value("learner_cmd", c.learner_cmd);
  c.learner_timeout_s = j.value("learner_timeout_s", c.learner_timeout_s);
  return c;
}

json event_to_json(const TraceEvent& e) {
  json j;
  j["type"] = "step";
  j["t"] = e.t;
  j["epoch"] = e.epoch;
  j["arm"] = e.arm;
  j["prob"] = e.probability;
  j["available"] = e.available;
  j["batch"] = e.batch;
  j["loss_before"] = e.loss_before;
  j["loss_after"] = e.loss_after;
  if (e.loss_eval) j["loss_eval"] = *e.loss_eval;
  j["raw_gain"] = e.raw_gain;
  j["q_lo"] = optional_number(e.q_lo);
  j["q_hi"] = optional_number(e.q_hi);
  j["reward"] = e.reward;
  if (e.validation_loss) j["validation_loss"] = *e.validation_loss;
  j["policy"] = e.policy_snapshot;
  return j;
}

TraceEvent event_from_json(const json& j) {
  TraceEvent e;
  e.t = j.at("t").get<std::uint64_t>();
  e.epoch = j.at("epoch").get<std::size_t>();
  e.arm = j.at("arm").get<std::size_t>();
  e.probability = j.value("prob", 1.0);
  e.available = j.value("available", std::vector<std::size_t>{});
  e.batch = j.value("batch", std::vector<std::string>{});
  e.loss_before = j.at("loss_before").get<double>();
  e.loss_after = j.at("loss_after").get<double>();
  e.loss_eval = read_optional(j, "loss_eval");
  e.raw_gain = j.at("raw_gain").get<double>();
  e.q_lo = read_optional(j, "q_lo");
  e.q_hi = read_optional(j, "q_hi");
  e.reward = j.at("reward").get<double>();
  e.validation_loss = read_optional(j, "validation_loss");
  e.policy_snapshot = j.value("policy", std::vector<double>{});
  return e;
}

void write_trace_header(std::ostream& out, const RunConfig& config) {
  json j;
  j["type"] = "header";
  j["config"] = config_to_json(config);
  out << j.dump() << '\n';
}

void write_trace_event(std::ostream& out, const TraceEvent& event) {
  out << event_to_json(event).dump() << '\n';
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        if (have_header) throw ParseError("second header");
        trace.config = config_from_json(j.at("config"));
        have_header = true;
      } else if (type == "step") {
        if (!have_header) throw ParseError("step before header");
        trace.events.push_back(event_from_json(j));
      } else {
        throw ParseError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError("trace has no header line");
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path.string());
  try {
    return read_trace(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace curriculum
