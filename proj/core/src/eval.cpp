#include "divsamp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

#include "divsamp/error.hpp"

namespace divsamp {

namespace {

double distance(const Vector& a, const Vector& b) {
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    sq += t * t;
  }
  return std::sqrt(sq);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % n;
  }
}

}  // namespace

void ReferenceSummary::validate() const {
  if (frame_indices.size() != frame_features.size()) {
    throw Error(ErrorCode::kInvalidConfig, "reference " + user_id + " has " +
                                               std::to_string(frame_indices.size()) + " indices but " +
                                               std::to_string(frame_features.size()) + " feature rows");
  }
  for (std::size_t i = 1; i < frame_indices.size(); ++i) {
    if (frame_indices[i] <= frame_indices[i - 1]) {
      throw Error(ErrorCode::kInvalidConfig,
                  "reference " + user_id + " frame indices are not strictly ascending");
    }
  }
  for (const auto& row : frame_features) {
    if (row.size() != frame_features.front().size()) {
      throw Error(ErrorCode::kDimensionMismatch, "reference " + user_id + " mixes feature dimensions");
    }
  }
}

std::vector<std::size_t> dedup(std::span<const Vector> points, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidConfig, "gamma must be positive");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool far = std::all_of(kept.begin(), kept.end(),
                                 [&](std::size_t j) { return distance(points[i], points[j]) > gamma; });
    if (far) kept.push_back(i);
  }
  return kept;
}

std::size_t choose_k(std::span<const std::size_t> reference_lengths) {
  if (reference_lengths.empty()) throw Error(ErrorCode::kEmptyReferenceSet, "no reference summaries");
  std::size_t k = *std::max_element(reference_lengths.begin(), reference_lengths.end());
  if (k < 5) k *= 2;
  return k;
}

MatchReport match_score(std::span<const Vector> generated, const ReferenceSummary& reference,
                        double gamma) {
  MatchReport report;
  report.gamma_used = gamma;
  report.k_used = generated.size();
  const auto& refs = reference.frame_features;
  if (!generated.empty() && !refs.empty()) {
    const std::size_t dim = refs.front().size();
    for (const auto& g : generated) {
      if (g.size() != dim) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "generated features of dimension " + std::to_string(g.size()) +
                        ", reference of " + std::to_string(dim));
      }
    }
  }

  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t g = 0; g < generated.size(); ++g) {
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const double d = distance(generated[g], refs[r]);
      if (d <= gamma) candidates.emplace_back(d, g, r);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<char> used_g(generated.size(), 0), used_r(refs.size(), 0);
  for (const auto& [d, g, r] : candidates) {
    if (used_g[g] || used_r[r]) continue;
    used_g[g] = used_r[r] = 1;
    report.matched_pairs.emplace_back(g, r);
  }
  if (!refs.empty()) {
    report.score = static_cast<double>(report.matched_pairs.size()) / static_cast<double>(refs.size());
  }
  return report;
}

EvaluationReport evaluate_summary(std::span<const Vector> generated,
                                  std::span<const ReferenceSummary> references, double gamma) {
  EvaluationReport report;
  report.retained = dedup(generated, gamma);
  std::vector<Vector> kept;
  kept.reserve(report.retained.size());
  for (auto i : report.retained) kept.push_back(generated[i]);
  double total = 0.0;
  for (const auto& ref : references) {
    report.per_user.push_back(match_score(kept, ref, gamma));
    total += report.per_user.back().score;
  }
  if (!references.empty()) report.mean_score = total / static_cast<double>(references.size());
  return report;
}

std::vector<FeatureVector> freeze_tail(std::vector<FeatureVector> stream, std::size_t tail_len) {
  if (tail_len > stream.size()) {
    throw Error(ErrorCode::kTailTooLong, "tail of " + std::to_string(tail_len) + " frames in a stream of " +
                                             std::to_string(stream.size()));
  }
  if (tail_len == 0) return stream;
  const std::size_t first = stream.size() - tail_len;
  const Vector frozen = stream[first].values;
  for (std::size_t i = first; i < stream.size(); ++i) stream[i].values = frozen;
  return stream;
}

MixtureStream::MixtureStream(std::vector<ClusterSpec> clusters, std::uint64_t seed)
    : clusters_(std::move(clusters)), rng_(seed) {
  for (const auto& c : clusters_) {
    if (!(c.stddev >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "cluster stddev must be non-negative");
  }
  skip_empty();
}

void MixtureStream::skip_empty() {
  while (cluster_ < clusters_.size() && emitted_in_cluster_ >= clusters_[cluster_].count) {
    ++cluster_;
    emitted_in_cluster_ = 0;
  }
}

std::pair<FeatureVector, std::size_t> MixtureStream::next() {
  const ClusterSpec& spec = clusters_[cluster_];
  FeatureVector frame{index_++, Vector(spec.center.size())};
  for (std::size_t j = 0; j < spec.center.size(); ++j) {
    frame.values[j] = spec.center[j] + spec.stddev * normal_(rng_);
  }
  const std::size_t label = cluster_;
  ++emitted_in_cluster_;
  skip_empty();
  return {std::move(frame), label};
}

LabeledStream synth_mixture(std::span<const ClusterSpec> clusters, StreamOrder order,
                            std::uint64_t seed) {
  LabeledStream out;
  MixtureStream source({clusters.begin(), clusters.end()}, seed);
  while (!source.done()) {
    auto [frame, label] = source.next();
    out.frames.push_back(std::move(frame));
    out.labels.push_back(label);
  }
  if (order == StreamOrder::kShuffled && out.frames.size() > 1) {
    std::mt19937_64 rng(splitmix64(seed));
    for (std::size_t i = out.frames.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(bounded(rng, i + 1));
      std::swap(out.frames[i], out.frames[j]);
      std::swap(out.labels[i], out.labels[j]);
    }
    for (std::size_t i = 0; i < out.frames.size(); ++i) out.frames[i].index = i;
  }
  return out;
}

double cluster_coverage(std::span<const StreamIndex> exemplar_indices,
                        std::span<const std::size_t> labels) {
  const std::set<std::size_t> all(labels.begin(), labels.end());
  if (all.empty()) return 0.0;
  std::set<std::size_t> hit;
  for (auto i : exemplar_indices) {
    if (i >= labels.size()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "exemplar index " + std::to_string(i) + " beyond " + std::to_string(labels.size()) + " labels");
    }
    hit.insert(labels[i]);
  }
  return static_cast<double>(hit.size()) / static_cast<double>(all.size());
}

SkewBenchmark make_skew_benchmark(const SkewBenchmarkConfig& config) {
  if (config.clusters == 0 || config.frames_per_cluster == 0 || config.dim == 0) {
    throw Error(ErrorCode::kInvalidConfig, "skew benchmark needs clusters, frames and dim > 0");
  }
  SkewBenchmark bench;
  std::mt19937_64 rng(splitmix64(config.seed));
  std::normal_distribution<double> normal;

  bench.centers.assign(config.clusters, Vector(config.dim));
  for (auto& c : bench.centers) {
    for (auto& x : c) x = normal(rng);
  }
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < config.clusters; ++a) {
    for (std::size_t b = a + 1; b < config.clusters; ++b) {
      closest = std::min(closest, distance(bench.centers[a], bench.centers[b]));
    }
  }
  if (std::isfinite(closest) && closest > 0.0) {
    for (auto& c : bench.centers) {
      for (auto& x : c) x *= config.separation / closest;
    }
  }

  std::vector<ClusterSpec> specs;
  for (const auto& c : bench.centers) specs.push_back({c, config.stddev, config.frames_per_cluster});
  specs.back().count += config.tail_len;
  auto stream = synth_mixture(specs, StreamOrder::kSequential, splitmix64(config.seed + 1));
  bench.frames = freeze_tail(std::move(stream.frames), config.tail_len);
  bench.labels = std::move(stream.labels);
  bench.frozen_begin = bench.frames.size() - config.tail_len;
  bench.gamma = config.separation / 2.0;

  for (std::size_t u = 0; u < config.users; ++u) {
    ReferenceSummary ref;
    ref.user_id = "u" + std::to_string(u + 1);
    for (std::size_t c = 0; c < config.clusters; ++c) {
      const std::size_t idx = c * config.frames_per_cluster +
                              static_cast<std::size_t>(bounded(rng, config.frames_per_cluster));
      ref.frame_indices.push_back(idx);
      ref.frame_features.push_back(bench.frames[idx].values);
    }
    bench.references.push_back(std::move(ref));
  }
  return bench;
}

}  // namespace divsamp
