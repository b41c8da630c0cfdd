#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curriculum/compressor.hpp"

namespace curriculum {

// One training item ranked by compressibility.
struct RankedExample {
  std::string id;
  std::filesystem::path payload_path;
  std::uint64_t size_before = 0;
  std::uint64_t size_after = 0;
  // 1 - size_after / size_before. Below 1 always; negative when the
  // compressor expands the payload.
  double cr = 0.0;
  std::string transcript;
};

struct ManifestRow {
  std::string id;
  std::filesystem::path payload_path;
  std::string transcript;
};

// K difficulty tiers. tasks[0] holds the highest-CR (easiest) examples.
struct TaskSet {
  std::size_t k = 0;
  std::vector<std::vector<std::string>> tasks;
  std::string compressor;

  std::size_t total_examples() const;
};

struct SyntheticSignal {
  std::vector<double> samples;
  double sample_rate = 16000.0;
  std::optional<double> snr_db;
};

struct SnrPoint {
  double snr_db = 0.0;
  double mean_cr = 0.0;
};

// Throws std::invalid_argument("empty payload") for an empty payload.
double compute_compression_ratio(std::span<const std::uint8_t> payload,
                                 const Compressor& compressor);

// One RankedExample per row, sorted by descending CR; ties by ascending id.
// Throws IoError naming the id of an unreadable payload, and
// std::invalid_argument on duplicate ids.
std::vector<RankedExample> rank_manifest(std::span<const ManifestRow> rows,
                                         const Compressor& compressor);

// Contiguous slices of a descending-CR list. When the size does not divide
// evenly, the first (easiest) tasks get one extra example each.
TaskSet partition_tasks(std::span<const RankedExample> ranked, std::size_t k,
                        std::string compressor_name = {});

// Adds seeded Gaussian noise, rescaled so the realized noise power gives
// exactly the requested SNR against the clean signal power.
SyntheticSignal synthesize_noisy_signal(const SyntheticSignal& clean,
                                        double snr_db, std::uint64_t seed);

// Mean CR of a fixed battery of 16-bit PCM tone mixtures at each SNR.
std::vector<SnrPoint> snr_study(std::span<const double> snr_values,
                                std::uint64_t seed,
                                const Compressor& compressor);

// Little-endian signed 16-bit PCM, clipped to the int16 range.
Bytes quantize_pcm16(std::span<const double> samples);

// --- file formats ---------------------------------------------------------

// `id<TAB>path<TAB>transcript` per line, no header. The transcript column may
// be empty or absent. Relative paths resolve against `base_dir`.
std::vector<ManifestRow> parse_manifest(std::istream& in,
                                        const std::filesystem::path& base_dir);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

void write_ranked_jsonl(std::ostream& out, std::span<const RankedExample> ranked);
std::vector<RankedExample> read_ranked_jsonl(std::istream& in);

void write_task_set(std::ostream& out, const TaskSet& tasks);
TaskSet read_task_set(std::istream& in);
TaskSet read_task_set(const std::filesystem::path& path);

}  // namespace curriculum
