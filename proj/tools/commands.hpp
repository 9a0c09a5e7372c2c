#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "divsamp/batch.hpp"
#include "divsamp/error.hpp"
#include "divsamp/eval.hpp"
#include "divsamp/feature_io.hpp"
#include "divsamp/model.hpp"

namespace divsamp::cli {

enum class Algorithm { kOnlineDiverse, kOnlineKMedoids, kPrecis, kKMedoids, kRandom, kUniform };

// Throws Error(kInvalidConfig) for unknown names.
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algo);
bool is_online(Algorithm algo);

// Pull-based frame supply shared by file input and in-memory streams.
struct FrameSource {
  std::function<std::optional<FeatureVector>()> next;
  std::optional<std::uint64_t> declared_count;
};

FrameSource from_reader(FeatureReader& reader);
FrameSource from_frames(const std::vector<FeatureVector>& frames);

struct SummarizeOptions {
  Algorithm algo = Algorithm::kOnlineDiverse;
  SamplerConfig sampler;  // k, beta, projection_dim, noise_rate, seed, ...
  std::size_t max_iters = 100;
  DiversityMeasure diversity = DiversityMeasure::kHullVolume;
  std::optional<double> gamma;
};

struct SummaryRun {
  std::vector<StreamIndex> exemplar_indices;  // ascending
  std::vector<Vector> exemplar_vectors;       // parallel to exemplar_indices
  std::vector<DiversityPoint> diversity_trace;
  std::vector<double> objective_trace;  // batch swap searches only
  std::uint64_t frames_seen = 0;
  double wall_time_ms = 0.0;
  std::size_t peak_stored_vectors = 0;
  std::optional<std::vector<StreamIndex>> deduplicated_indices;  // when gamma is set
};

// Online algorithms consume the source in one pass holding O(k) vectors; the
// batch ones buffer it. Random and uniform sampling need a declared count.
SummaryRun summarize(const SummarizeOptions& options, FrameSource source);

// Keys are emitted in sorted order, so two identical runs give identical
// bytes apart from wall_time_ms.
nlohmann::json summary_to_json(const SummarizeOptions& options, const SummaryRun& run);

// exemplar_indices of a summary document. Throws Error(kIo) when malformed.
std::vector<StreamIndex> summary_indices(const nlohmann::json& summary);

struct Evaluation {
  std::vector<StreamIndex> generated_indices;  // ascending, after resolution
  std::vector<ReferenceSummary> references;
  EvaluationReport report;
  double gamma = 0.0;
  std::size_t suggested_k = 0;
};

// Resolves `indices` against the feature source (one pass, holding only the
// requested frames) and scores them. Throws Error(kIndexOutOfRange) when an
// index is past the end of the source.
Evaluation evaluate(std::vector<StreamIndex> indices, FrameSource features,
                    std::vector<ReferenceSummary> references, double gamma);

nlohmann::json evaluation_to_json(const Evaluation& eval);
// user,score,matches,reference_length; one row per user, then a mean row.
void write_evaluation_csv(std::ostream& out, const Evaluation& eval);

struct BenchOptions {
  std::vector<std::uint64_t> ns{10000, 20000, 40000};
  std::vector<Algorithm> algos{Algorithm::kOnlineDiverse};
  std::size_t k = 20;
  std::size_t dim = 64;
  std::size_t projection_dim = 3;
  double beta = 0.5;
  double noise_rate = 0.05;
  std::uint64_t seed = 0;
  std::size_t repeats = 3;
};

struct BenchRow {
  Algorithm algo = Algorithm::kOnlineDiverse;
  std::uint64_t n = 0;
  double wall_ms = 0.0;  // median over repeats
  double frames_per_sec = 0.0;
  std::size_t peak_stored_vectors = 0;
};

// Synthetic streams are generated lazily, so online runs never hold the data.
std::vector<BenchRow> run_bench(const BenchOptions& options);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

struct SweepOptions {
  std::vector<double> betas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t trials = 5;
  SamplerConfig sampler;  // beta and seed are overridden per run
  // Synthetic mode (default): a fresh frozen-tail benchmark per trial.
  SkewBenchmarkConfig synthetic;
  // File mode: set features_path and references; trials vary the sampler seed.
  std::optional<std::string> features_path;
  ReaderOptions reader;
  std::vector<ReferenceSummary> references;
  double gamma = 70.0;
};

struct SweepRow {
  double beta = 0.0;
  double mean_score = 0.0;
  std::size_t runs = 0;
};

std::vector<SweepRow> run_sweep(const SweepOptions& options);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Maps an error to the process exit code: 2 for usage/config, 3 for IO/format.
int exit_code_for(const Error& error);

}  // namespace divsamp::cli
