#include "curriculum/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "curriculum/error.hpp"
#include "curriculum/random.hpp"

namespace curriculum {

using nlohmann::json;

std::size_t TaskSet::total_examples() const {
  std::size_t n = 0;
  for (const auto& task : tasks) n += task.size();
  return n;
}

double compute_compression_ratio(std::span<const std::uint8_t> payload,
                                 const Compressor& compressor) {
  if (payload.empty()) throw std::invalid_argument("empty payload");
  const Bytes compressed = compressor.compress(payload);
  return 1.0 - static_cast<double>(compressed.size()) /
                   static_cast<double>(payload.size());
}

namespace {

Bytes read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return data;
}

}  // namespace

std::vector<RankedExample> rank_manifest(std::span<const ManifestRow> rows,
                                         const Compressor& compressor) {
  std::set<std::string_view> seen;
  for (const auto& row : rows) {
    if (!seen.insert(row.id).second) {
      throw std::invalid_argument("duplicate id in manifest: " + row.id);
    }
  }

  std::vector<RankedExample> ranked;
  ranked.reserve(rows.size());
  for (const auto& row : rows) {
    Bytes payload;
    try {
      payload = read_bytes(row.payload_path);
    } catch (const IoError& e) {
      throw IoError("example '" + row.id + "': " + e.what());
    }
    if (payload.empty()) {
      throw std::invalid_argument("example '" + row.id + "': empty payload");
    }
    RankedExample ex;
    ex.id = row.id;
    ex.payload_path = row.payload_path;
    ex.size_before = payload.size();
    ex.size_after = compressor.compress(payload).size();
    ex.cr = 1.0 - static_cast<double>(ex.size_after) / static_cast<double>(ex.size_before);
    ex.transcript = row.transcript;
    ranked.push_back(std::move(ex));
  }

  std::sort(ranked.begin(), ranked.end(), [](const RankedExample& a, const RankedExample& b) {
    if (a.cr != b.cr) return a.cr > b.cr;
    return a.id < b.id;
  });
  return ranked;
}

TaskSet partition_tasks(std::span<const RankedExample> ranked, std::size_t k,
                        std::string compressor_name) {
  if (k < 1 || k > ranked.size()) {
    throw std::invalid_argument("task count k=" + std::to_string(k) +
                                " must be in [1, " + std::to_string(ranked.size()) + "]");
  }
  TaskSet out;
  out.k = k;
  out.compressor = std::move(compressor_name);
  out.tasks.resize(k);
  const std::size_t base = ranked.size() / k;
  const std::size_t extra = ranked.size() % k;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t n = base + (i < extra ? 1 : 0);
    auto& task = out.tasks[i];
    task.reserve(n);
    for (std::size_t j = 0; j < n; ++j) task.push_back(ranked[pos + j].id);
    pos += n;
  }
  return out;
}

namespace {

double mean_power(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

}  // namespace

SyntheticSignal synthesize_noisy_signal(const SyntheticSignal& clean,
                                        double snr_db, std::uint64_t seed) {
  if (clean.samples.empty()) throw std::invalid_argument("clean signal is empty");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
  const double signal_power = mean_power(clean.samples);
  if (!(signal_power > 0.0) || !std::isfinite(signal_power)) {
    throw std::invalid_argument("clean signal has zero power");
  }

  Rng rng(seed);
  std::vector<double> noise(clean.samples.size());
  for (double& v : noise) v = rng.normal();
  const double raw_power = mean_power(noise);
  const double target_power = signal_power / std::pow(10.0, snr_db / 10.0);
  const double scale = std::sqrt(target_power / raw_power);

  SyntheticSignal out;
  out.sample_rate = clean.sample_rate;
  out.snr_db = snr_db;
  out.samples.resize(clean.samples.size());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    out.samples[i] = clean.samples[i] + scale * noise[i];
  }
  return out;
}

Bytes quantize_pcm16(std::span<const double> samples) {
  Bytes out;
  out.reserve(samples.size() * 2);
  for (double v : samples) {
    double scaled = std::round(v * 32767.0);
    scaled = std::clamp(scaled, -32768.0, 32767.0);
    const auto s = static_cast<std::int16_t>(scaled);
    const auto u = static_cast<std::uint16_t>(s);
    out.push_back(static_cast<std::uint8_t>(u & 0xFF));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  }
  return out;
}

namespace {

struct Tone {
  double frequency_hz;
  double amplitude;
};

// Battery of clean signals: a few tones and two-tone chords at moderate
// levels, one second at 16 kHz each. Peak stays below full scale at 15 dB
// SNR so clipping does not flatten the noisiest mixtures.
const std::vector<std::vector<Tone>>& battery() {
  static const std::vector<std::vector<Tone>> signals = {
      {{220.0, 0.3}},
      {{440.0, 0.25}},
      {{1000.0, 0.2}},
      {{330.0, 0.2}, {660.0, 0.1}},
      {{150.0, 0.15}, {2500.0, 0.05}},
  };
  return signals;
}

SyntheticSignal render(const std::vector<Tone>& tones, double sample_rate,
                       std::size_t length) {
  SyntheticSignal s;
  s.sample_rate = sample_rate;
  s.samples.assign(length, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    const double time = static_cast<double>(i) / sample_rate;
    for (const auto& tone : tones) {
      s.samples[i] += tone.amplitude * std::sin(2.0 * std::numbers::pi * tone.frequency_hz * time);
    }
  }
  return s;
}

}  // namespace

std::vector<SnrPoint> snr_study(std::span<const double> snr_values,
                                std::uint64_t seed,
                                const Compressor& compressor) {
  if (snr_values.empty()) throw std::invalid_argument("snr_values is empty");
  constexpr double kSampleRate = 16000.0;
  constexpr std::size_t kLength = 16000;

  std::vector<SyntheticSignal> clean;
  for (const auto& tones : battery()) clean.push_back(render(tones, kSampleRate, kLength));

  std::vector<SnrPoint> points;
  points.reserve(snr_values.size());
  for (std::size_t i = 0; i < snr_values.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < clean.size(); ++j) {
      const std::uint64_t sub_seed = mix_seed(mix_seed(seed, i), j);
      const auto noisy = synthesize_noisy_signal(clean[j], snr_values[i], sub_seed);
      const Bytes pcm = quantize_pcm16(noisy.samples);
      total += compute_compression_ratio(pcm, compressor);
    }
    points.push_back({snr_values[i], total / static_cast<double>(clean.size())});
  }
  return points;
}

// --- file formats -----------------------------------------------------------

std::vector<ManifestRow> parse_manifest(std::istream& in,
                                        const std::filesystem::path& base_dir) {
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    if (tab1 == std::string::npos) {
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": expected id<TAB>path<TAB>transcript");
    }
    const auto tab2 = line.find('\t', tab1 + 1);
    ManifestRow row;
    row.id = line.substr(0, tab1);
    std::string path = line.substr(tab1 + 1, tab2 == std::string::npos ? std::string::npos
                                                                        : tab2 - tab1 - 1);
    if (tab2 != std::string::npos) row.transcript = line.substr(tab2 + 1);
    if (row.id.empty() || path.empty()) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": empty id or path");
    }
    std::filesystem::path p(path);
    row.payload_path = p.is_relative() ? base_dir / p : p;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path());
}

void write_ranked_jsonl(std::ostream& out, std::span<const RankedExample> ranked) {
  for (const auto& ex : ranked) {
    json j;
    j["id"] = ex.id;
    j["size_before"] = ex.size_before;
    j["size_after"] = ex.size_after;
    j["cr"] = ex.cr;
    j["transcript"] = ex.transcript;
    out << j.dump() << '\n';
  }
}

std::vector<RankedExample> read_ranked_jsonl(std::istream& in) {
  std::vector<RankedExample> ranked;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      RankedExample ex;
      ex.id = j.at("id").get<std::string>();
      ex.size_before = j.at("size_before").get<std::uint64_t>();
      ex.size_after = j.at("size_after").get<std::uint64_t>();
      ex.cr = j.at("cr").get<double>();
      ex.transcript = j.value("transcript", std::string{});
      ranked.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw ParseError("ranked line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ranked;
}

void write_task_set(std::ostream& out, const TaskSet& tasks) {
  json j;
  j["k"] = tasks.k;
  j["tasks"] = tasks.tasks;
  j["compressor"] = tasks.compressor;
  out << j.dump() << '\n';
}

TaskSet read_task_set(std::istream& in) {
  TaskSet ts;
  try {
    const json j = json::parse(in);
    ts.k = j.at("k").get<std::size_t>();
    ts.tasks = j.at("tasks").get<std::vector<std::vector<std::string>>>();
    ts.compressor = j.value("compressor", std::string{});
  } catch (const json::exception& e) {
    throw ParseError(std::string("task set: ") + e.what());
  }
  if (ts.k != ts.tasks.size()) {
    throw ParseError("task set: k=" + std::to_string(ts.k) + " but " +
                     std::to_string(ts.tasks.size()) + " task lists");
  }
  return ts;
}

TaskSet read_task_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open task set " + path.string());
  return read_task_set(in);
}

}  // namespace curriculum
