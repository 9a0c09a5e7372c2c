#include "divsamp/batch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "divsamp/error.hpp"
#include "divsamp/geometry.hpp"

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

void require_sizes(std::size_t n, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidConfig, "k must be positive");
  if (n < k) {
    throw Error(ErrorCode::kTooFewPoints,
                "need at least k = " + std::to_string(k) + " points, got " + std::to_string(n));
  }
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % n;
  }
}

std::vector<Vector> gather(std::span<const Vector> points, std::span<const std::size_t> selected) {
  std::vector<Vector> out;
  out.reserve(selected.size());
  for (auto i : selected) out.push_back(points[i]);
  return out;
}

double variance_of(std::span<const Vector> set) {
  Vector mean(set.front().size(), 0.0);
  for (const auto& p : set) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += p[j];
  }
  for (auto& m : mean) m /= static_cast<double>(set.size());
  double acc = 0.0;
  for (const auto& p : set) {
    for (std::size_t j = 0; j < mean.size(); ++j) acc += (p[j] - mean[j]) * (p[j] - mean[j]);
  }
  return acc / static_cast<double>(set.size());
}

double diversity_of(std::span<const Vector> set, const BatchConfig& config) {
  return config.diversity == DiversityMeasure::kVariance ? variance_of(set)
                                                         : divscore(set, config.projection_dim);
}

// Nearest and second-nearest selected slot per point.
struct Assignment {
  std::vector<std::size_t> nearest;
  std::vector<double> d1;
  std::vector<double> d2;
  double cost = 0.0;

  Assignment(std::span<const Vector> points, std::span<const std::size_t> selected)
      : nearest(points.size()), d1(points.size()), d2(points.size()) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = inf, second = inf;
      std::size_t slot = 0;
      for (std::size_t s = 0; s < selected.size(); ++s) {
        const double d = distance(points[i], points[selected[s]]);
        if (d < best) {
          second = best;
          best = d;
          slot = s;
        } else if (d < second) {
          second = d;
        }
      }
      nearest[i] = slot;
      d1[i] = best;
      d2[i] = second;
      cost += best;
    }
  }
};

// Best-improvement swap search. diversity_weight == 0 skips the diversity
// term entirely, so beta = 1 and plain K-medoids share one code path.
BatchResult swap_search(std::span<const Vector> points, const BatchConfig& config, double beta,
                        double diversity_weight) {
  const std::size_t n = points.size();
  const std::size_t k = config.k;
  BatchResult result;
  result.indices = random_sample(n, k, config.seed);

  auto objective_of = [&](double cost, double diversity) {
    return diversity_weight == 0.0 ? beta * cost : beta * cost - diversity_weight * diversity;
  };

  std::vector<Vector> centers = gather(points, result.indices);
  double diversity = diversity_weight == 0.0 ? 0.0 : diversity_of(centers, config);
  Assignment assign(points, result.indices);
  double current = objective_of(assign.cost, diversity);
  result.objective_trace.push_back(current);

  std::vector<char> is_selected(n, 0);
  for (auto i : result.indices) is_selected[i] = 1;
  std::vector<double> column(n);
  std::vector<double> swap_div(k, 0.0);

  while (result.iterations < config.max_iters) {
    ++result.iterations;
    double best = current;
    std::size_t best_slot = k, best_cand = n;
    const double min_gain = 1e-12 * std::max(std::abs(current), 1.0);

    for (std::size_t cand = 0; cand < n; ++cand) {
      if (is_selected[cand]) continue;
      for (std::size_t i = 0; i < n; ++i) column[i] = distance(points[i], points[cand]);
      if (diversity_weight != 0.0) {
        if (config.diversity == DiversityMeasure::kHullVolume) {
          swap_div = swap_volumes(centers, points[cand], config.projection_dim, SwapBasis::kPerSwap).swapped;
        } else {
          for (std::size_t s = 0; s < k; ++s) {
            const Vector kept = std::exchange(centers[s], points[cand]);
            swap_div[s] = variance_of(centers);
            centers[s] = kept;
          }
        }
      }
      for (std::size_t s = 0; s < k; ++s) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double keep = assign.nearest[i] == s ? assign.d2[i] : assign.d1[i];
          cost += std::min(column[i], keep);
        }
        const double value = objective_of(cost, swap_div[s]);
        if (value < best - min_gain) {
          best = value;
          best_slot = s;
          best_cand = cand;
        }
      }
    }
    if (best_cand == n) {
      result.converged = true;
      break;
    }
    is_selected[result.indices[best_slot]] = 0;
    is_selected[best_cand] = 1;
    result.indices[best_slot] = best_cand;
    centers[best_slot] = points[best_cand];
    assign = Assignment(points, result.indices);
    diversity = diversity_weight == 0.0 ? 0.0 : diversity_of(centers, config);
    current = objective_of(assign.cost, diversity);
    result.objective_trace.push_back(current);
  }
  return result;
}

}  // namespace

void BatchConfig::validate(std::size_t n) const {
  require_sizes(n, k);
  if (max_iters == 0) throw Error(ErrorCode::kInvalidConfig, "max_iters must be at least 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "beta must lie in [0, 1]");
  if (projection_dim != 2 && projection_dim != 3) {
    throw Error(ErrorCode::kUnsupportedDimension,
                "projection dimension " + std::to_string(projection_dim) + " (supported: 2, 3)");
  }
  if (!(norm_factor_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "normalizing factor scale must be positive");
  }
}

double kmedoids_objective(std::span<const Vector> points, std::span<const std::size_t> selected) {
  return Assignment(points, selected).cost;
}

double precis_objective(std::span<const Vector> points, std::span<const std::size_t> selected,
                        const BatchConfig& config) {
  const double weight =
      config.norm_factor_scale * static_cast<double>(points.size()) * (1.0 - config.beta);
  const double cost = kmedoids_objective(points, selected);
  if (weight == 0.0) return config.beta * cost;
  return config.beta * cost - weight * diversity_of(gather(points, selected), config);
}

BatchResult batch_kmedoids(std::span<const Vector> points, const BatchConfig& config) {
  config.validate(points.size());
  return swap_search(points, config, 1.0, 0.0);
}

BatchResult batch_precis(std::span<const Vector> points, const BatchConfig& config) {
  config.validate(points.size());
  if (config.diversity == DiversityMeasure::kHullVolume && config.k < config.projection_dim + 1) {
    throw Error(ErrorCode::kInvalidConfig, "precis needs k >= projection dimension + 1");
  }
  const double weight =
      config.norm_factor_scale * static_cast<double>(points.size()) * (1.0 - config.beta);
  return swap_search(points, config, config.beta, weight);
}

std::vector<std::size_t> random_sample(std::size_t n, std::size_t k, std::uint64_t seed) {
  require_sizes(n, k);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t j = 0; j < k; ++j) {
    const auto pick = j + static_cast<std::size_t>(bounded(rng, n - j));
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(k);
  return pool;
}

std::vector<std::size_t> uniform_sample(std::size_t n, std::size_t k) {
  require_sizes(n, k);
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = static_cast<std::size_t>(static_cast<std::uint64_t>(j) * n / k);
  }
  return out;
}

}  // namespace divsamp
