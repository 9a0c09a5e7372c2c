#include "divsamp/model.hpp"

#include <cmath>
#include <string>

#include "divsamp/error.hpp"

namespace divsamp {

void SamplerConfig::validate(std::optional<std::size_t> dim) const {
  if (k == 0) throw Error(ErrorCode::kInvalidConfig, "k must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "beta must lie in [0, 1]");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "noise rate must lie in [0, 1]");
  }
  if (projection_dim != 2 && projection_dim != 3) {
    throw Error(ErrorCode::kUnsupportedDimension,
                "projection dimension " + std::to_string(projection_dim) + " (supported: 2, 3)");
  }
  if (!(norm_factor_scale > 0.0) || !std::isfinite(norm_factor_scale)) {
    throw Error(ErrorCode::kInvalidConfig, "normalizing factor scale must be positive");
  }
  if (dim && projection_dim > *dim) {
    throw Error(ErrorCode::kInvalidConfig, "projection dimension " + std::to_string(projection_dim) +
                                               " exceeds feature dimension " + std::to_string(*dim));
  }
}

const FeatureVector& validate_stream_item(const FeatureVector& item, std::size_t expected_dim) {
  if (item.values.size() != expected_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "frame " + std::to_string(item.index) + " has " +
                                                   std::to_string(item.values.size()) +
                                                   " values, expected " + std::to_string(expected_dim));
  }
  for (std::size_t j = 0; j < item.values.size(); ++j) {
    if (!std::isfinite(item.values[j])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "frame " + std::to_string(item.index) + " coordinate " + std::to_string(j));
    }
  }
  return item;
}

const char* to_string(UpdateKind kind) noexcept {
  switch (kind) {
    case UpdateKind::kInitialized: return "initialized";
    case UpdateKind::kReplaced: return "replaced";
    case UpdateKind::kRejected: return "rejected";
  }
  return "?";
}

const char* to_string(UpdateReason reason) noexcept {
  switch (reason) {
    case UpdateReason::kNone: return "none";
    case UpdateReason::kDiversity: return "diversity";
    case UpdateReason::kNoise: return "noise";
  }
  return "?";
}

}  // namespace divsamp
