#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "divsamp/model.hpp"

namespace divsamp {

// Affine map x -> rows * (x - mean) onto the top principal directions of a
// point set. Rows are orthonormal; each row's first nonzero coordinate is
// positive.
struct ProjectionBasis {
  Vector mean;
  std::vector<Vector> rows;

  std::size_t input_dim() const noexcept { return mean.size(); }
  std::size_t output_dim() const noexcept { return rows.size(); }
};

// PCA of `points` (M >= 2, target_dim <= min(M - 1, D)). Directions beyond
// the rank of the point set are completed with arbitrary orthonormal vectors.
// Throws Error(kDegenerateData) when all points coincide.
ProjectionBasis fit_projection(std::span<const Vector> points, std::size_t target_dim);

// rows * (x - mean). Throws Error(kDimensionMismatch).
Vector project(const ProjectionBasis& basis, std::span<const double> x);

// Lebesgue measure of the convex hull of `points` in R^2 (area) or R^3
// (volume). Affinely degenerate sets measure 0. Throws
// Error(kUnsupportedDimension) for any other dimension.
double hull_volume(std::span<const Vector> points);

// Hull volume of the centers after PCA projection to R^d, d in {2, 3}.
// Zero when the centers coincide or K < d + 1.
double divscore(std::span<const Vector> centers, std::size_t d);

// divscore of `centers` with the exemplar at `slot` (0-based) replaced by
// `candidate`. Throws Error(kSlotOutOfRange).
double divscore_swap(const ExemplarSet& centers, std::size_t slot, const FeatureVector& candidate,
                     std::size_t d);

struct SwapVolumes {
  double base = 0.0;             // divscore of the unswapped centers
  std::vector<double> swapped;   // swapped[k]: volume with slot k replaced
};

// Scores all K swaps of `candidate` into `centers` with shared per-frame work
// (one Gram matrix, one PCA under kPerFrame).
SwapVolumes swap_volumes(std::span<const Vector> centers, std::span<const double> candidate,
                         std::size_t d, SwapBasis policy);

namespace detail {

using Point2 = std::array<double, 2>;
using Point3 = std::array<double, 3>;

// Andrew's monotone chain + shoelace. Reorders `points`.
double hull_area_2d(std::vector<Point2>& points);

// Incremental hull with signed tetrahedra volume sum.
double hull_volume_3d(std::span<const Point3> points);

}  // namespace detail

}  // namespace divsamp
