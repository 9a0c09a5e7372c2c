#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "divsamp/model.hpp"

namespace divsamp {

// Outcome of the winner competition for one frame, before any update.
struct WinnerChoice {
  std::size_t slot = 0;
  std::vector<double> costs;          // d(k) per slot
  std::vector<double> swap_volumes;   // divscore with slot k replaced by x
  double base_volume = 0.0;           // divscore of the current exemplars
};

// Winner of the diversity-biased competition for frame `frame_index`:
// argmin_k d(k), ties to the lowest slot.
WinnerChoice select_diverse_winner(const ExemplarSet& exemplars, std::span<const double> x,
                                   std::uint64_t frame_index, const SamplerConfig& config);

// argmin_k |x - mu_k|, ties to the lowest slot.
std::size_t nearest_exemplar(const ExemplarSet& exemplars, std::span<const double> x);

// Single-pass exemplar selection over an unbounded stream. Holds at most K
// exemplars plus the frame being observed. Drive a state with either
// observe() (diversity-biased sampler) or observe_kmedoids() (competitive
// learning baseline with unit learning rate), not both.
class SamplerState {
 public:
  // Throws Error(kInvalidConfig / kUnsupportedDimension).
  explicit SamplerState(SamplerConfig config);

  // Frames must arrive with index == frames_seen(). The first frame fixes D.
  UpdateOutcome observe(const FeatureVector& x);
  UpdateOutcome observe_kmedoids(const FeatureVector& x);

  // Throws Error(kInsufficientFrames) before K frames have been seen.
  SummaryResult finalize() const;

  const SamplerConfig& config() const noexcept { return config_; }
  const ExemplarSet& exemplars() const noexcept { return exemplars_; }
  std::uint64_t frames_seen() const noexcept { return frames_seen_; }
  std::size_t peak_stored_vectors() const noexcept { return peak_stored_; }

 private:
  // Validates x; returns true when x was consumed by initialization.
  bool admit(const FeatureVector& x, UpdateOutcome& outcome);
  void replace(std::size_t slot, const FeatureVector& x);
  void record(std::uint64_t frame, const UpdateOutcome& outcome);
  bool noise_fires();

  SamplerConfig config_;
  ExemplarSet exemplars_;
  std::optional<std::size_t> dim_;
  std::mt19937_64 rng_;
  std::uint64_t frames_seen_ = 0;
  std::size_t peak_stored_ = 0;
  std::vector<DiversityPoint> trace_;
  std::vector<UpdateEvent> log_;
};

}  // namespace divsamp
