#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "divsamp/model.hpp"

namespace divsamp {

// One user's reference summary: the frames they picked and their features.
struct ReferenceSummary {
  std::string user_id;
  std::vector<StreamIndex> frame_indices;
  std::vector<Vector> frame_features;

  // Indices ascending and distinct, one feature row per index, one dimension.
  // Throws Error(kInvalidConfig / kDimensionMismatch).
  void validate() const;
};

struct MatchReport {
  // (position in generated, position in reference)
  std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;
  double score = 0.0;
  double gamma_used = 0.0;
  std::size_t k_used = 0;
};

// Greedy scan in input order: keep a point iff it is farther than gamma from
// every point kept so far. Returns kept positions.
std::vector<std::size_t> dedup(std::span<const Vector> points, double gamma);

// Summary length from the users' summary lengths: the longest, doubled when
// it is below 5. Throws Error(kEmptyReferenceSet).
std::size_t choose_k(std::span<const std::size_t> reference_lengths);

// One-to-one matching of generated to reference frames within gamma, greedy
// in ascending distance (ties by generated then reference position).
// score = matches / |reference|. Throws Error(kDimensionMismatch).
MatchReport match_score(std::span<const Vector> generated, const ReferenceSummary& reference,
                        double gamma);

struct EvaluationReport {
  std::vector<std::size_t> retained;  // positions in generated kept by dedup
  std::vector<MatchReport> per_user;
  double mean_score = 0.0;
};

// dedup(generated, gamma), then match_score against every reference.
// `generated` is expected in stream order.
EvaluationReport evaluate_summary(std::span<const Vector> generated,
                                  std::span<const ReferenceSummary> references, double gamma);

// Replaces the last tail_len frames by copies of frame N - tail_len (indices
// kept). Throws Error(kTailTooLong).
std::vector<FeatureVector> freeze_tail(std::vector<FeatureVector> stream, std::size_t tail_len);

struct ClusterSpec {
  Vector center;
  double stddev = 1.0;
  std::size_t count = 0;
};

enum class StreamOrder { kSequential, kShuffled };

struct LabeledStream {
  std::vector<FeatureVector> frames;
  std::vector<std::size_t> labels;
};

// Lazily emits isotropic Gaussian draws, cluster after cluster, so a stream of
// any length can be produced without holding it.
class MixtureStream {
 public:
  MixtureStream(std::vector<ClusterSpec> clusters, std::uint64_t seed);

  bool done() const noexcept { return cluster_ >= clusters_.size(); }
  // Precondition: !done(). Returns the frame and its cluster label.
  std::pair<FeatureVector, std::size_t> next();

 private:
  void skip_empty();

  std::vector<ClusterSpec> clusters_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::size_t cluster_ = 0;
  std::size_t emitted_in_cluster_ = 0;
  StreamIndex index_ = 0;
};

LabeledStream synth_mixture(std::span<const ClusterSpec> clusters, StreamOrder order,
                            std::uint64_t seed);

// Fraction of distinct labels with at least one exemplar.
// Throws Error(kIndexOutOfRange).
double cluster_coverage(std::span<const StreamIndex> exemplar_indices,
                        std::span<const std::size_t> labels);

// A stream of well-separated Gaussian clusters shown one after another, whose
// last tail_len frames are frozen on a single frame, with synthetic user
// summaries that pick one random frame from each cluster.
struct SkewBenchmarkConfig {
  std::size_t clusters = 5;
  std::size_t frames_per_cluster = 300;
  std::size_t tail_len = 500;
  std::size_t dim = 16;
  double stddev = 1.0;
  double separation = 20.0;  // minimum distance between cluster centers
  std::size_t users = 5;
  std::uint64_t seed = 0;
};

struct SkewBenchmark {
  std::vector<FeatureVector> frames;
  std::vector<std::size_t> labels;
  std::vector<ReferenceSummary> references;
  std::vector<Vector> centers;
  std::size_t frozen_begin = 0;  // first frame of the frozen segment
  double gamma = 0.0;            // separation / 2
};

SkewBenchmark make_skew_benchmark(const SkewBenchmarkConfig& config);

}  // namespace divsamp
