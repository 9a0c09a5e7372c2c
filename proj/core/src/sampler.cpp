#include "divsamp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "divsamp/error.hpp"
#include "divsamp/geometry.hpp"

namespace divsamp {

namespace {

// A swap must beat zeta by more than rounding noise to count as an improvement.
constexpr double kGateRelTol = 1e-12;

double distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    sq += t * t;
  }
  return std::sqrt(sq);
}

std::size_t argmin(const std::vector<double>& values) {
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

WinnerChoice select_diverse_winner(const ExemplarSet& exemplars, std::span<const double> x,
                                   std::uint64_t frame_index, const SamplerConfig& config) {
  if (exemplars.size() == 0) throw Error(ErrorCode::kNotInitialized, "no exemplars to compete");
  WinnerChoice choice;
  auto volumes = swap_volumes(exemplars.exemplars, x, config.projection_dim, config.swap_basis);
  choice.base_volume = volumes.base;
  choice.swap_volumes = std::move(volumes.swapped);

  const double c = config.norm_factor_scale * static_cast<double>(frame_index);
  const double beta = config.beta;
  choice.costs.resize(exemplars.size());
  for (std::size_t k = 0; k < exemplars.size(); ++k) {
    const double dist = distance(x, exemplars.exemplars[k]);
    if (config.cost_form == CostForm::kAlgorithm) {
      const double gain = choice.swap_volumes[k] - choice.base_volume;
      choice.costs[k] = beta * dist - c * (1.0 - beta) * gain;
    } else {
      choice.costs[k] = beta * dist * dist + c * (1.0 - beta) * choice.swap_volumes[k] - exemplars.zeta;
    }
  }
  choice.slot = argmin(choice.costs);
  return choice;
}

std::size_t nearest_exemplar(const ExemplarSet& exemplars, std::span<const double> x) {
  if (exemplars.size() == 0) throw Error(ErrorCode::kNotInitialized, "no exemplars to compete");
  std::vector<double> dists(exemplars.size());
  for (std::size_t k = 0; k < exemplars.size(); ++k) dists[k] = distance(x, exemplars.exemplars[k]);
  return argmin(dists);
}

SamplerState::SamplerState(SamplerConfig config) : config_(config), rng_(config.seed) {
  config_.validate();
  exemplars_.exemplars.reserve(config_.k);
  exemplars_.source_indices.reserve(config_.k);
}

bool SamplerState::admit(const FeatureVector& x, UpdateOutcome& outcome) {
  if (!dim_) {
    config_.validate(x.values.size());
    dim_ = x.values.size();
  }
  validate_stream_item(x, *dim_);
  if (x.index != frames_seen_) {
    throw Error(ErrorCode::kIndexOutOfRange, "frame index " + std::to_string(x.index) +
                                                 " out of order, expected " +
                                                 std::to_string(frames_seen_));
  }
  // Exemplars plus the frame in flight.
  peak_stored_ = std::max(peak_stored_, exemplars_.size() + 1);
  ++frames_seen_;

  if (exemplars_.size() < config_.k) {
    exemplars_.exemplars.push_back(x.values);
    exemplars_.source_indices.push_back(x.index);
    outcome = UpdateOutcome::initialized(exemplars_.size() - 1);
    if (exemplars_.size() == config_.k) {
      exemplars_.zeta = divscore(exemplars_.exemplars, config_.projection_dim);
      trace_.push_back({x.index, exemplars_.zeta, UpdateReason::kNone});
    }
    record(x.index, outcome);
    return true;
  }
  return false;
}

void SamplerState::replace(std::size_t slot, const FeatureVector& x) {
  exemplars_.exemplars[slot] = x.values;
  exemplars_.source_indices[slot] = x.index;
}

void SamplerState::record(std::uint64_t frame, const UpdateOutcome& outcome) {
  if (config_.record_history) log_.push_back({frame, outcome});
}

bool SamplerState::noise_fires() {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return u < config_.noise_rate;
}

UpdateOutcome SamplerState::observe(const FeatureVector& x) {
  UpdateOutcome outcome;
  if (admit(x, outcome)) return outcome;

  const WinnerChoice choice = select_diverse_winner(exemplars_, x.values, x.index, config_);
  const double candidate_volume = choice.swap_volumes[choice.slot];
  // zeta is the high-water mark; noise replacements never lower it.
  if (candidate_volume > exemplars_.zeta * (1.0 + kGateRelTol)) {
    replace(choice.slot, x);
    exemplars_.zeta = candidate_volume;
    trace_.push_back({x.index, candidate_volume, UpdateReason::kDiversity});
    outcome = UpdateOutcome::replaced(choice.slot, UpdateReason::kDiversity);
  } else if (noise_fires()) {
    replace(choice.slot, x);
    outcome = UpdateOutcome::replaced(choice.slot, UpdateReason::kNoise);
  } else {
    outcome = UpdateOutcome::rejected();
  }
  record(x.index, outcome);
  return outcome;
}

UpdateOutcome SamplerState::observe_kmedoids(const FeatureVector& x) {
  UpdateOutcome outcome;
  if (admit(x, outcome)) return outcome;

  const std::size_t slot = nearest_exemplar(exemplars_, x.values);
  replace(slot, x);
  outcome = UpdateOutcome::replaced(slot, UpdateReason::kDiversity);
  if (config_.record_history) {
    exemplars_.zeta = divscore(exemplars_.exemplars, config_.projection_dim);
    trace_.push_back({x.index, exemplars_.zeta, UpdateReason::kDiversity});
  }
  record(x.index, outcome);
  return outcome;
}

SummaryResult SamplerState::finalize() const {
  if (frames_seen_ < config_.k) {
    throw Error(ErrorCode::kInsufficientFrames, "saw " + std::to_string(frames_seen_) +
                                                    " frames, need at least k = " +
                                                    std::to_string(config_.k));
  }
  SummaryResult result;
  result.exemplar_indices = exemplars_.source_indices;
  result.exemplar_vectors = exemplars_.exemplars;
  result.diversity_trace = trace_;
  result.update_log = log_;
  result.frames_seen = frames_seen_;
  result.peak_stored_vectors = peak_stored_;
  return result;
}

}  // namespace divsamp
