#pragma once

#include <chrono>
#include <string>
#include <sys/types.h>

#include "json.hpp"

#include "curriculum/learner.hpp"

namespace curriculum {

inline constexpr int kProtocolVersion = 1;

struct ExternalLearnerOptions {
  // Run through /bin/sh -c.
  std::string command;
  std::chrono::milliseconds timeout{std::chrono::seconds(600)};
};

// Learner backed by a trainer subprocess speaking line-delimited JSON on its
// stdin/stdout. One request is outstanding at a time. See
// docs/learner_protocol.md for the message set.
//
// Any protocol violation (bad JSON, missing field, child exit, timeout)
// raises ProtocolError whose message names the last request sent.
class ExternalLearner final : public Learner {
 public:
  explicit ExternalLearner(ExternalLearnerOptions options);
  ~ExternalLearner() override;

  ExternalLearner(const ExternalLearner&) = delete;
  ExternalLearner& operator=(const ExternalLearner&) = delete;

  LearnerReport train(std::size_t task,
                      std::span<const std::string> batch) override;
  double eval(std::size_t task, std::span<const std::string> batch) override;
  double validation_loss() override;

  // Sends one request and waits for one response line.
  nlohmann::json roundtrip(const nlohmann::json& request);

  // Sends {"cmd":"shutdown"}, closes the pipes and reaps the child.
  // Returns the child's exit status (128+signal if it was killed).
  int shutdown();

  bool running() const { return pid_ > 0; }

 private:
  void send_line(const std::string& line);
  std::string read_line();
  [[noreturn]] void fail(const std::string& what);
  int reap(std::chrono::milliseconds grace);
  void kill_child();

  ExternalLearnerOptions options_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string last_request_;
};

}  // namespace curriculum
