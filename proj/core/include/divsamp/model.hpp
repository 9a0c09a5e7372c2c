#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace divsamp {

using Vector = std::vector<double>;
using StreamIndex = std::uint64_t;

// One frame of a feature stream: its position and its D-dimensional features.
struct FeatureVector {
  StreamIndex index = 0;
  Vector values;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// The K current exemplars, the stream positions they were taken from, and
// the highest diversity score any accepted configuration has reached.
struct ExemplarSet {
  std::vector<Vector> exemplars;
  std::vector<StreamIndex> source_indices;
  double zeta = 0.0;

  std::size_t size() const noexcept { return exemplars.size(); }

  friend bool operator==(const ExemplarSet&, const ExemplarSet&) = default;
};

// Which winner cost to minimize.
//  kAlgorithm: beta * |x - mu_k|   - C (1 - beta) (vol(mu_{k<-x}) - vol(mu))
//  kEquation:  beta * |x - mu_k|^2 + C (1 - beta) vol(mu_{k<-x}) - zeta
enum class CostForm { kAlgorithm, kEquation };

// How the projection is chosen when scoring all K single swaps of one frame.
enum class SwapBasis {
  // One basis fit on the current centers, reused for every swap; the
  // candidate is projected with it.
  kPerFrame,
  // Each swapped set gets its own PCA fit, so every value is an exact
  // divscore of the swapped set.
  kPerSwap,
};

struct SamplerConfig {
  std::size_t k = 10;
  double beta = 0.5;
  std::size_t projection_dim = 3;
  double noise_rate = 0.05;
  std::uint64_t seed = 0;
  // The per-frame normalizer is C = norm_factor_scale * i.
  double norm_factor_scale = 10.0;
  CostForm cost_form = CostForm::kAlgorithm;
  SwapBasis swap_basis = SwapBasis::kPerFrame;
  // Keep one event per observed frame in SummaryResult::update_log, and the
  // per-update diversity of the K-medoids baseline in the diversity trace.
  bool record_history = true;

  // Throws Error(kInvalidConfig). Pass the stream dimension once known.
  void validate(std::optional<std::size_t> dim = std::nullopt) const;
};

enum class UpdateKind : std::uint8_t { kInitialized, kReplaced, kRejected };
enum class UpdateReason : std::uint8_t { kNone, kDiversity, kNoise };

struct UpdateOutcome {
  UpdateKind kind = UpdateKind::kRejected;
  std::size_t slot = 0;  // meaningful for kInitialized and kReplaced
  UpdateReason reason = UpdateReason::kNone;

  static UpdateOutcome initialized(std::size_t slot) {
    return {UpdateKind::kInitialized, slot, UpdateReason::kNone};
  }
  static UpdateOutcome replaced(std::size_t slot, UpdateReason reason) {
    return {UpdateKind::kReplaced, slot, reason};
  }
  static UpdateOutcome rejected() { return {}; }

  friend bool operator==(const UpdateOutcome&, const UpdateOutcome&) = default;
};

struct UpdateEvent {
  StreamIndex frame = 0;
  UpdateOutcome outcome;

  friend bool operator==(const UpdateEvent&, const UpdateEvent&) = default;
};

// A point on the diversity curve: zeta after the frame was processed.
struct DiversityPoint {
  StreamIndex frame = 0;
  double zeta = 0.0;
  UpdateReason reason = UpdateReason::kNone;

  friend bool operator==(const DiversityPoint&, const DiversityPoint&) = default;
};

struct SummaryResult {
  std::vector<StreamIndex> exemplar_indices;
  std::vector<Vector> exemplar_vectors;
  std::vector<DiversityPoint> diversity_trace;
  std::vector<UpdateEvent> update_log;
  std::uint64_t frames_seen = 0;
  std::size_t peak_stored_vectors = 0;

  friend bool operator==(const SummaryResult&, const SummaryResult&) = default;
};

// Returns the item unchanged if it has expected_dim entries, all finite.
// Throws Error(kDimensionMismatch) or Error(kNonFiniteValue).
const FeatureVector& validate_stream_item(const FeatureVector& item, std::size_t expected_dim);

const char* to_string(UpdateKind kind) noexcept;
const char* to_string(UpdateReason reason) noexcept;

}  // namespace divsamp
