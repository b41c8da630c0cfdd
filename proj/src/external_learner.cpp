#include "curriculum/external_learner.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include "curriculum/error.hpp"

namespace curriculum {

using nlohmann::json;

namespace {

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

double require_loss(const json& response, const char* field, const std::string& context) {
  if (!response.is_object() || !response.contains(field)) {
    throw ProtocolError(std::string("response missing \"") + field + "\" " + context);
  }
  const auto& v = response.at(field);
  if (!v.is_number()) {
    throw ProtocolError(std::string("field \"") + field + "\" is not a number " + context);
  }
  const double loss = v.get<double>();
  if (!std::isfinite(loss) || loss < 0.0) {
    throw ProtocolError(std::string("field \"") + field + "\" must be finite and >= 0 " + context);
  }
  return loss;
}

}  // namespace

ExternalLearner::ExternalLearner(ExternalLearnerOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw std::invalid_argument("external learner: empty command");
  // A dead child must surface as EPIPE from write(), not kill this process.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  }

  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw ProtocolError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    // Own process group, so a hung grandchild behind the shell dies with it.
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::setpgid(pid_, pid_);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  try {
    const json hello = roundtrip({{"cmd", "hello"}, {"version", kProtocolVersion}});
    if (!hello.is_object() || !hello.contains("version") || !hello["version"].is_number_integer() ||
        hello["version"].get<int>() != kProtocolVersion) {
      fail("handshake: expected {\"version\":" + std::to_string(kProtocolVersion) + "}, got " +
           hello.dump());
    }
  } catch (...) {
    kill_child();
    throw;
  }
}

ExternalLearner::~ExternalLearner() {
  if (pid_ <= 0) return;
  try {
    shutdown();
  } catch (...) {
    kill_child();
  }
}

void ExternalLearner::kill_child() {
  if (pid_ <= 0) return;
  ::kill(-pid_, SIGKILL);
  ::kill(pid_, SIGKILL);
  close_fd(to_child_);
  close_fd(from_child_);
  while (::waitpid(pid_, nullptr, 0) < 0 && errno == EINTR) {
  }
  pid_ = -1;
}

void ExternalLearner::fail(const std::string& what) {
  std::string message = "external learner: " + what;
  if (!last_request_.empty()) message += " (last request: " + last_request_ + ")";
  throw ProtocolError(message);
}

void ExternalLearner::send_line(const std::string& line) {
  std::string data = line + '\n';
  std::size_t offset = 0;
  while (offset < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + offset, data.size() - offset);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write failed: ") + std::strerror(errno));
    }
    offset += static_cast<std::size_t>(n);
  }
}

std::string ExternalLearner::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  for (;;) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      // The conversation is out of sync from here on; no point keeping the child.
      kill_child();
      fail("timed out after " + std::to_string(options_.timeout.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      fail(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) fail("subprocess closed its output (exited?)");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

json ExternalLearner::roundtrip(const json& request) {
  if (pid_ <= 0) fail("subprocess is not running");
  last_request_ = request.dump();
  send_line(last_request_);
  const std::string line = read_line();
  json response;
  try {
    response = json::parse(line);
  } catch (const json::parse_error&) {
    fail("malformed JSON response: " + line);
  }
  if (response.is_object() && response.contains("error")) {
    fail("learner reported error: " + response["error"].dump());
  }
  return response;
}

LearnerReport ExternalLearner::train(std::size_t task, std::span<const std::string> batch) {
  const json response = roundtrip({{"cmd", "train"},
                                   {"task", task},
                                   {"batch_size", batch.size()},
                                   {"ids", std::vector<std::string>(batch.begin(), batch.end())}});
  const std::string context = "(last request: " + last_request_ + ")";
  LearnerReport report;
  report.loss_before = require_loss(response, "loss_before", context);
  report.loss_after = require_loss(response, "loss_after", context);
  report.step_cost = static_cast<double>(batch.size());
  return report;
}

double ExternalLearner::eval(std::size_t task, std::span<const std::string> batch) {
  const json response = roundtrip({{"cmd", "eval"},
                                   {"task", task},
                                   {"batch_size", batch.size()},
                                   {"ids", std::vector<std::string>(batch.begin(), batch.end())}});
  return require_loss(response, "loss", "(last request: " + last_request_ + ")");
}

double ExternalLearner::validation_loss() {
  const json response = roundtrip({{"cmd", "validate"}});
  return require_loss(response, "loss", "(last request: " + last_request_ + ")");
}

int ExternalLearner::reap(std::chrono::milliseconds grace) {
  const auto deadline = std::chrono::steady_clock::now() + grace;
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) break;
    if (r < 0 && errno != EINTR) {
      pid_ = -1;
      return -1;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid_, SIGKILL);
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  pid_ = -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

int ExternalLearner::shutdown() {
  if (pid_ <= 0) return -1;
  last_request_ = R"({"cmd":"shutdown"})";
  try {
    send_line(last_request_);
  } catch (const ProtocolError&) {
    // Child already gone; reaping below reports how it ended.
  }
  close_fd(to_child_);
  close_fd(from_child_);
  return reap(std::chrono::seconds(5));
}

}  // namespace curriculum
