// curriculum: rank a corpus by compressibility, split it into difficulty
// tiers, run bandit-driven curricula, and summarize the resulting traces.
//
// Exit codes: 0 success, 1 usage, 2 IO/parse, 3 learner/protocol failure.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "curriculum/corpus.hpp"
#include "curriculum/error.hpp"
#include "curriculum/metrics.hpp"
#include "curriculum/report.hpp"
#include "curriculum/scheduler.hpp"
#include "curriculum/trace_io.hpp"

namespace {

using namespace curriculum;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitLearner = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// --- rank -------------------------------------------------------------------

struct RankArgs {
  std::string manifest;
  std::string out;
};

int cmd_rank(const RankArgs& args) {
  const auto rows = read_manifest(args.manifest);
  const Compressor compressor = gzip_compressor();
  const auto ranked = rank_manifest(rows, compressor);
  auto out = open_out(args.out);
  write_ranked_jsonl(out, ranked);
  if (!out) throw IoError("write failed for " + args.out);
  std::cout << "ranked " << ranked.size() << " examples with " << compressor.name;
  if (!ranked.empty()) {
    std::cout << ", cr range [" << format_double(ranked.back().cr) << ", "
              << format_double(ranked.front().cr) << "]";
  }
  std::cout << '\n';
  return kExitOk;
}

// --- partition --------------------------------------------------------------

struct PartitionArgs {
  std::string ranked;
  std::size_t k = 5;
  std::string out;
  std::string compressor = "gzip@6";
};

int cmd_partition(const PartitionArgs& args) {
  std::ifstream in(args.ranked);
  if (!in) throw IoError("cannot open " + args.ranked);
  const auto ranked = read_ranked_jsonl(in);
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    if (ranked[i].cr > ranked[i - 1].cr) {
      throw ParseError(args.ranked + ": not sorted by descending cr at line " +
                       std::to_string(i + 1));
    }
  }
  const TaskSet tasks = partition_tasks(ranked, args.k, args.compressor);
  auto out = open_out(args.out);
  write_task_set(out, tasks);
  std::cout << "wrote " << tasks.k << " tasks:";
  for (const auto& t : tasks.tasks) std::cout << ' ' << t.size();
  std::cout << '\n';
  return kExitOk;
}

// --- run --------------------------------------------------------------------

struct RunArgs {
  std::string tasks_file;
  std::string algo = "ucb1";
  std::string gain = "pg";
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double c = 0.5;
  double gamma = 0.01;
  std::uint64_t seed = 0;
  std::string learner = "synthetic";
  std::string learner_cmd;
  double learner_timeout = 600.0;
  double eta = 0.2;
  double init_p = 0.05;
  double noise_sigma = 0.0;
  std::size_t warmup = kDefaultWarmup;
  std::size_t history_capacity = 0;
  std::size_t validate_every = 0;
  std::string out;
};

struct RunOptions {
  CLI::Option* c = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* learner_cmd = nullptr;
  CLI::Option* learner_timeout = nullptr;
  CLI::Option* eta = nullptr;
  CLI::Option* init_p = nullptr;
  CLI::Option* noise_sigma = nullptr;
};

RunConfig build_run_config(const RunArgs& args, const RunOptions& opts, std::size_t k) {
  RunConfig config;
  try {
    config.policy = parse_policy_kind(args.algo);
    config.gain = parse_gain_kind(args.gain);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opts.c->count() > 0 && config.policy != PolicyKind::ucb1) {
    throw UsageError("--c only applies to --algo ucb1");
  }
  if (opts.gamma->count() > 0 && config.policy != PolicyKind::exp3) {
    throw UsageError("--gamma only applies to --algo exp3");
  }
  if (args.learner == "external") {
    if (opts.learner_cmd->count() == 0) throw UsageError("--learner external needs --learner-cmd");
    for (auto* o : {opts.eta, opts.init_p, opts.noise_sigma}) {
      if (o->count() > 0) throw UsageError(o->get_name() + " only applies to --learner synthetic");
    }
  } else if (args.learner == "synthetic") {
    for (auto* o : {opts.learner_cmd, opts.learner_timeout}) {
      if (o->count() > 0) throw UsageError(o->get_name() + " only applies to --learner external");
    }
  }
  config.c = args.c;
  config.gamma = args.gamma;
  config.k = k;
  config.epochs = args.epochs;
  config.batch_size = args.batch_size;
  config.seed = args.seed;
  config.warmup = args.warmup;
  if (args.history_capacity > 0) config.history_capacity = args.history_capacity;
  config.validate_every = args.validate_every;
  config.learner = args.learner;
  config.learner_cmd = args.learner_cmd;
  config.learner_timeout_s = args.learner_timeout;
  config.eta = args.eta;
  config.init_p = args.init_p;
  config.noise_sigma = args.noise_sigma;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

int cmd_run(const RunArgs& args, const RunOptions& opts) {
  const TaskSet tasks = read_task_set(args.tasks_file);
  const RunConfig config = build_run_config(args, opts, tasks.k);

  auto out = open_out(args.out);
  write_trace_header(out, config);
  out.flush();

  std::unique_ptr<Learner> learner = make_learner(config);
  std::size_t steps = 0;
  std::optional<double> last_validation;
  const auto events = run_curriculum(config, tasks, *learner, [&](const TraceEvent& e) {
    write_trace_event(out, e);
    out.flush();
    ++steps;
    if (e.validation_loss) last_validation = e.validation_loss;
  });
  if (!out) throw IoError("write failed for " + args.out);
  std::cout << "run complete: " << steps << " steps over " << config.epochs << " epochs";
  if (last_validation) std::cout << ", final validation loss " << format_double(*last_validation);
  std::cout << '\n';
  return kExitOk;
}

// --- snr-study --------------------------------------------------------------

struct SnrArgs {
  std::vector<double> snrs{0.0, 5.0, 10.0, 15.0};
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_snr_study(const SnrArgs& args) {
  const Compressor compressor = gzip_compressor();
  const auto points = snr_study(args.snrs, args.seed, compressor);
  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  if (ec) throw IoError("cannot create " + args.out_dir + ": " + ec.message());
  const auto path = (std::filesystem::path(args.out_dir) / "snr_cr.csv").string();
  auto out = open_out(path);
  out << "snr_db,mean_cr\n";
  for (const auto& p : points) out << format_double(p.snr_db) << ',' << format_double(p.mean_cr) << '\n';
  if (!out) throw IoError("write failed for " + path);
  std::cout << "wrote " << points.size() << " rows to " << path << " (" << compressor.name << ")\n";
  return kExitOk;
}

// --- wer --------------------------------------------------------------------

struct WerArgs {
  std::string ref;
  std::string hyp;
  std::string out;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string rate_cell(double rate) { return std::isinf(rate) ? "inf" : format_double(rate); }

void write_rates(std::ostream& out, const ErrorRateResult& w, const ErrorRateResult& c) {
  out << w.reference_length << ',' << w.substitutions << ',' << w.insertions << ','
      << w.deletions << ',' << rate_cell(w.rate) << ',' << c.reference_length << ','
      << c.substitutions << ',' << c.insertions << ',' << c.deletions << ',' << rate_cell(c.rate)
      << '\n';
}

int cmd_wer(const WerArgs& args) {
  const auto refs = read_lines(args.ref);
  const auto hyps = read_lines(args.hyp);
  if (refs.size() != hyps.size()) {
    throw ParseError("line count mismatch: " + std::to_string(refs.size()) + " references vs " +
                     std::to_string(hyps.size()) + " hypotheses");
  }
  std::ofstream file;
  if (!args.out.empty()) file = open_out(args.out);
  std::ostream& out = args.out.empty() ? std::cout : file;

  out << "line,ref_words,word_sub,word_ins,word_del,wer,ref_chars,char_sub,char_ins,char_del,cer\n";
  std::vector<ErrorRateResult> words;
  std::vector<ErrorRateResult> chars;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    words.push_back(wer(refs[i], hyps[i]));
    chars.push_back(cer(refs[i], hyps[i]));
    out << (i + 1) << ',';
    write_rates(out, words.back(), chars.back());
  }
  out << "all,";
  write_rates(out, aggregate(words), aggregate(chars));
  if (!out) throw IoError("write failed");
  return kExitOk;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> traces;
  std::string out_dir = "report";
  std::vector<double> thresholds{0.5, 0.2, 0.1};
};

int cmd_report(const ReportArgs& args) {
  std::vector<NamedTrace> runs;
  for (const auto& path : args.traces) {
    std::string name = run_name_from_path(path);
    for (const auto& r : runs) {
      if (r.name == name) name += "_" + std::to_string(runs.size());
    }
    runs.push_back({name, read_trace(path)});
  }
  try {
    write_report(runs, args.out_dir, args.thresholds);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  std::cout << "wrote report for " << runs.size() << " run(s) to " << args.out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compression-ranked, bandit-scheduled training curricula"};
  app.require_subcommand(1);

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank", "Rank manifest examples by compression ratio");
  rank->add_option("--manifest", rank_args.manifest, "TSV manifest: id, path, transcript")
      ->required();
  rank->add_option("--out", rank_args.out, "Ranked JSONL output")->required();

  PartitionArgs part_args;
  auto* part = app.add_subcommand("partition", "Split a ranked list into K tasks");
  part->add_option("--ranked", part_args.ranked, "Ranked JSONL from `rank`")->required();
  part->add_option("--k", part_args.k, "Number of tasks")->capture_default_str();
  part->add_option("--out", part_args.out, "TaskSet JSON output")->required();
  part->add_option("--compressor", part_args.compressor, "Compressor tag recorded in the output")
      ->capture_default_str();

  RunArgs run_args;
  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a bandit curriculum and write a trace");
  run->add_option("--tasks-file", run_args.tasks_file, "TaskSet JSON")->required();
  run->add_option("--algo", run_args.algo, "Policy")
      ->check(CLI::IsMember({"ucb1", "exp3", "random", "sequential"}))
      ->capture_default_str();
  run->add_option("--gain", run_args.gain, "Progress gain")
      ->check(CLI::IsMember({"pg", "spg"}))
      ->capture_default_str();
  run->add_option("--epochs", run_args.epochs)->capture_default_str();
  run->add_option("--batch-size", run_args.batch_size)->capture_default_str();
  run_opts.c = run->add_option("--c", run_args.c, "UCB1 exploration constant")->capture_default_str();
  run_opts.gamma =
      run->add_option("--gamma", run_args.gamma, "EXP3 exploration probability")->capture_default_str();
  run->add_option("--seed", run_args.seed)->capture_default_str();
  run->add_option("--learner", run_args.learner)
      ->check(CLI::IsMember({"synthetic", "external"}))
      ->capture_default_str();
  run_opts.learner_cmd = run->add_option("--learner-cmd", run_args.learner_cmd,
                                         "Trainer command (run via /bin/sh -c)");
  run_opts.learner_timeout = run->add_option("--learner-timeout", run_args.learner_timeout,
                                             "Seconds to wait for each response")
                                 ->capture_default_str();
  run_opts.eta = run->add_option("--eta", run_args.eta, "Synthetic learning rate")->capture_default_str();
  run_opts.init_p = run->add_option("--init-p", run_args.init_p, "Synthetic initial proficiency")
                        ->capture_default_str();
  run_opts.noise_sigma = run->add_option("--noise-sigma", run_args.noise_sigma,
                                         "Synthetic loss observation noise")
                             ->capture_default_str();
  run->add_option("--warmup", run_args.warmup, "Gains seen before quantile mapping starts")
      ->capture_default_str();
  run->add_option("--history-capacity", run_args.history_capacity,
                  "Gain history window (0 = unbounded)")
      ->capture_default_str();
  run->add_option("--validate-every", run_args.validate_every,
                  "Extra validation every N steps (0 = epoch ends only)")
      ->capture_default_str();
  run->add_option("--out", run_args.out, "Trace output (.trace.jsonl)")->required();

  SnrArgs snr_args;
  auto* snr = app.add_subcommand("snr-study", "Mean compression ratio of noisy tones vs SNR");
  snr->add_option("--snrs", snr_args.snrs, "SNR values in dB")
      ->delimiter(',')
      ->capture_default_str();
  snr->add_option("--seed", snr_args.seed)->capture_default_str();
  snr->add_option("--out-dir", snr_args.out_dir, "Directory for snr_cr.csv")->capture_default_str();

  WerArgs wer_args;
  auto* wer_cmd = app.add_subcommand("wer", "Per-line and corpus WER/CER as CSV");
  wer_cmd->add_option("--ref", wer_args.ref, "Reference transcripts, one per line")->required();
  wer_cmd->add_option("--hyp", wer_args.hyp, "Hypotheses, aligned by line")->required();
  wer_cmd->add_option("--out", wer_args.out, "CSV output (default stdout)");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Curves and summary from trace files");
  report->add_option("traces", report_args.traces, "Trace files")->required();
  report->add_option("--out-dir", report_args.out_dir)->capture_default_str();
  report->add_option("--thresholds", report_args.thresholds, "Validation-loss thresholds")
      ->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*rank) return cmd_rank(rank_args);
    if (*part) return cmd_partition(part_args);
    if (*run) return cmd_run(run_args, run_opts);
    if (*snr) return cmd_snr_study(snr_args);
    if (*wer_cmd) return cmd_wer(wer_args);
    if (*report) return cmd_report(report_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ProtocolError& e) {
    std::cerr << "learner error: " << e.what() << '\n';
    return kExitLearner;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
