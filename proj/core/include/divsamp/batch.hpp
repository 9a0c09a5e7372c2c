#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "divsamp/model.hpp"

namespace divsamp {

enum class DiversityMeasure {
  kHullVolume,  // divscore of the selected points
  kVariance,    // mean squared distance of the selected points to their centroid
};

struct BatchConfig {
  std::size_t k = 10;
  std::size_t max_iters = 100;
  double beta = 0.5;                // Precis only
  std::size_t projection_dim = 3;   // Precis only
  std::uint64_t seed = 0;
  double norm_factor_scale = 10.0;  // Precis diversity weight C_b = scale * N
  DiversityMeasure diversity = DiversityMeasure::kHullVolume;

  void validate(std::size_t n) const;
};

struct BatchResult {
  std::vector<std::size_t> indices;
  // Objective of the starting set, then after every accepted swap.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  bool converged = false;  // stopped at a local optimum rather than max_iters
};

// Sum over points of the distance to the nearest selected point.
double kmedoids_objective(std::span<const Vector> points, std::span<const std::size_t> selected);

// beta * kmedoids_objective - scale * N * (1 - beta) * diversity(selected).
double precis_objective(std::span<const Vector> points, std::span<const std::size_t> selected,
                        const BatchConfig& config);

// Best-improvement PAM swap search on the l2 assignment cost, started from
// random_sample(N, k, seed). Throws Error(kTooFewPoints) when N < k.
BatchResult batch_kmedoids(std::span<const Vector> points, const BatchConfig& config);

// The same swap search on precis_objective. beta = 1 reproduces
// batch_kmedoids exactly. Throws Error(kTooFewPoints) when N < k.
BatchResult batch_precis(std::span<const Vector> points, const BatchConfig& config);

// k distinct indices in [0, n), uniformly without replacement, in draw order.
std::vector<std::size_t> random_sample(std::size_t n, std::size_t k, std::uint64_t seed);

// floor(j * n / k) for j = 0..k-1.
std::vector<std::size_t> uniform_sample(std::size_t n, std::size_t k);

}  // namespace divsamp
