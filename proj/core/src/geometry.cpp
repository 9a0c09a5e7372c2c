#include "divsamp/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "divsamp/error.hpp"

namespace divsamp {

namespace {

// Coplanarity/collinearity tolerance, relative to the bounding-box diagonal.
constexpr double kRelTol = 1e-12;
// Principal axes with eigenvalue below kRankTol * largest are treated as absent.
constexpr double kRankTol = 1e-12;

using detail::Point2;
using detail::Point3;

void check_supported(std::size_t d) {
  if (d != 2 && d != 3) {
    throw Error(ErrorCode::kUnsupportedDimension,
                "hull dimension " + std::to_string(d) + " (supported: 2, 3)");
  }
}

std::size_t common_dim(std::span<const Vector> points) {
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "point of dimension " + std::to_string(p.size()) + " in a set of dimension " +
                      std::to_string(dim));
    }
  }
  return dim;
}

template <std::size_t N>
double bbox_diagonal(std::span<const std::array<double, N>> points) {
  std::array<double, N> lo = points.front();
  std::array<double, N> hi = points.front();
  for (const auto& p : points) {
    for (std::size_t j = 0; j < N; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < N; ++j) sq += (hi[j] - lo[j]) * (hi[j] - lo[j]);
  return std::sqrt(sq);
}

// ---- 3D vector helpers ----

Point3 sub(const Point3& a, const Point3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Point3 cross(const Point3& a, const Point3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Point3& a, const Point3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

struct Face {
  std::array<std::uint32_t, 3> v;
  Point3 normal;  // unit, outward
  double offset;  // normal . v0
  bool alive;
};

class Hull3 {
 public:
  Hull3(std::span<const Point3> pts, double tol) : pts_(pts), tol_(tol) {}

  // Returns false when no four affinely independent points exist.
  bool build() {
    std::array<std::uint32_t, 4> seed{};
    if (!initial_simplex(seed)) return false;
    interior_ = {0.0, 0.0, 0.0};
    for (auto i : seed) {
      for (int j = 0; j < 3; ++j) interior_[j] += pts_[i][j] / 4.0;
    }
    const auto [a, b, c, d] = seed;
    add_face(a, b, c);
    add_face(a, b, d);
    add_face(a, c, d);
    add_face(b, c, d);
    for (std::uint32_t i = 0; i < pts_.size(); ++i) {
      if (std::find(seed.begin(), seed.end(), i) != seed.end()) continue;
      add_point(i);
    }
    return true;
  }

  double volume() const {
    double vol = 0.0;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      const Point3 a = sub(pts_[f.v[0]], interior_);
      const Point3 b = sub(pts_[f.v[1]], interior_);
      const Point3 c = sub(pts_[f.v[2]], interior_);
      vol += dot(a, cross(b, c));
    }
    return std::abs(vol) / 6.0;
  }

 private:
  bool initial_simplex(std::array<std::uint32_t, 4>& seed) const {
    const auto n = static_cast<std::uint32_t>(pts_.size());
    std::uint32_t i0 = 0;
    for (std::uint32_t i = 1; i < n; ++i) {
      if (pts_[i] < pts_[i0]) i0 = i;
    }
    std::uint32_t i1 = i0;
    double best = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double dist = norm(sub(pts_[i], pts_[i0]));
      if (dist > best) best = dist, i1 = i;
    }
    if (best <= tol_) return false;

    const Point3 dir = sub(pts_[i1], pts_[i0]);
    const double dir_len = norm(dir);
    std::uint32_t i2 = i0;
    best = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double dist = norm(cross(sub(pts_[i], pts_[i0]), dir)) / dir_len;
      if (dist > best) best = dist, i2 = i;
    }
    if (best <= tol_) return false;

    Point3 nrm = cross(dir, sub(pts_[i2], pts_[i0]));
    const double nrm_len = norm(nrm);
    std::uint32_t i3 = i0;
    best = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double dist = std::abs(dot(sub(pts_[i], pts_[i0]), nrm)) / nrm_len;
      if (dist > best) best = dist, i3 = i;
    }
    if (best <= tol_) return false;
    seed = {i0, i1, i2, i3};
    return true;
  }

  void add_face(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    Point3 n = cross(sub(pts_[b], pts_[a]), sub(pts_[c], pts_[a]));
    const double len = norm(n);
    if (len > 0.0) {
      for (auto& x : n) x /= len;
    }
    if (dot(n, sub(interior_, pts_[a])) > 0.0) {
      std::swap(b, c);
      for (auto& x : n) x = -x;
    }
    faces_.push_back({{a, b, c}, n, dot(n, pts_[a]), true});
  }

  void add_point(std::uint32_t p) {
    visible_.clear();
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (faces_[f].alive && dot(faces_[f].normal, pts_[p]) - faces_[f].offset > tol_) {
        visible_.push_back(f);
      }
    }
    if (visible_.empty()) return;

    edges_.clear();
    for (auto f : visible_) {
      const auto& v = faces_[f].v;
      edges_.emplace_back(v[0], v[1]);
      edges_.emplace_back(v[1], v[2]);
      edges_.emplace_back(v[2], v[0]);
      faces_[f].alive = false;
    }
    std::sort(edges_.begin(), edges_.end());
    horizon_.clear();
    for (const auto& [u, w] : edges_) {
      if (!std::binary_search(edges_.begin(), edges_.end(), std::make_pair(w, u))) {
        horizon_.emplace_back(u, w);
      }
    }
    for (const auto& [u, w] : horizon_) add_face(u, w, p);
  }

  std::span<const Point3> pts_;
  double tol_;
  Point3 interior_{};
  std::vector<Face> faces_;
  std::vector<std::size_t> visible_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon_;
};

// ---- PCA through the K x K Gram matrix ----

Eigen::MatrixXd centered_rows(std::span<const Vector> points, const Vector& origin) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(origin.size());
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = points[i][j] - origin[j];
  }
  return a;
}

Vector mean_of(std::span<const Vector> points) {
  Vector mean(points.front().size(), 0.0);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += p[j];
  }
  for (auto& x : mean) x /= static_cast<double>(points.size());
  return mean;
}

void double_center(Eigen::MatrixXd& g) {
  const Eigen::VectorXd row_mean = g.rowwise().mean();
  const double total = row_mean.mean();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) += total - row_mean(i) - row_mean(j);
  }
}

// Top-d principal scores of each point, read off the Gram eigenpairs
// (score_i,c = sqrt(lambda_c) * v_c(i)). Missing axes are left at zero.
std::vector<Point3> scores_from_gram(Eigen::MatrixXd g, std::size_t d) {
  double_center(g);
  const Eigen::Index m = g.rows();
  std::vector<Point3> scores(static_cast<std::size_t>(m), Point3{0.0, 0.0, 0.0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const auto& vals = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();
  const auto axes = std::min<Eigen::Index>(static_cast<Eigen::Index>(d), m);
  for (Eigen::Index c = 0; c < axes; ++c) {
    const Eigen::Index col = m - 1 - c;
    const double scale = std::sqrt(std::max(vals(col), 0.0));
    for (Eigen::Index i = 0; i < m; ++i) scores[i][c] = scale * vecs(i, col);
  }
  return scores;
}

double volume_of_scores(std::span<const Point3> scores, std::size_t d) {
  if (d == 2) {
    std::vector<Point2> flat(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) flat[i] = {scores[i][0], scores[i][1]};
    return detail::hull_area_2d(flat);
  }
  return detail::hull_volume_3d(scores);
}

}  // namespace

namespace detail {

double hull_area_2d(std::vector<Point2>& points) {
  if (points.size() < 3) return 0.0;
  const double diag = bbox_diagonal<2>(points);
  if (diag == 0.0) return 0.0;
  const double tol = kRelTol * diag * diag;

  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  if (n < 3) return 0.0;

  auto turn = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Point2> hull(2 * n);
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (h >= 2 && turn(hull[h - 2], hull[h - 1], points[i]) <= tol) --h;
    hull[h++] = points[i];
  }
  for (std::size_t i = n - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && turn(hull[h - 2], hull[h - 1], points[i]) <= tol) --h;
    hull[h++] = points[i];
  }
  --h;  // last point repeats the first
  if (h < 3) return 0.0;

  double twice_area = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % h];
    twice_area += p[0] * q[1] - q[0] * p[1];
  }
  return std::abs(twice_area) / 2.0;
}

double hull_volume_3d(std::span<const Point3> points) {
  if (points.size() < 4) return 0.0;
  const double diag = bbox_diagonal<3>(points);
  if (diag == 0.0) return 0.0;
  Hull3 hull(points, kRelTol * diag);
  if (!hull.build()) return 0.0;
  return hull.volume();
}

}  // namespace detail

ProjectionBasis fit_projection(std::span<const Vector> points, std::size_t target_dim) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints, "projection needs at least 2 points");
  }
  const std::size_t dim = common_dim(points);
  if (target_dim == 0 || target_dim > std::min(points.size() - 1, dim)) {
    throw Error(ErrorCode::kInvalidConfig,
                "target dimension " + std::to_string(target_dim) + " exceeds min(M - 1, D) = " +
                    std::to_string(std::min(points.size() - 1, dim)));
  }
  bool all_same = true;
  for (const auto& p : points) all_same = all_same && p == points.front();
  if (all_same) throw Error(ErrorCode::kDegenerateData, "all points coincide");

  ProjectionBasis basis;
  basis.mean = mean_of(points);
  const Eigen::MatrixXd a = centered_rows(points, basis.mean);
  const Eigen::MatrixXd g = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const auto& vals = eig.eigenvalues();
  const Eigen::Index m = g.rows();
  const double largest = std::max(vals(m - 1), 0.0);

  std::vector<Eigen::VectorXd> rows;
  for (std::size_t c = 0; c < target_dim; ++c) {
    const Eigen::Index col = m - 1 - static_cast<Eigen::Index>(c);
    if (vals(col) <= kRankTol * largest) break;
    rows.push_back(a.transpose() * eig.eigenvectors().col(col) / std::sqrt(vals(col)));
  }

  // Re-orthonormalize, then complete with coordinate axes if rank < target_dim.
  auto orthonormalize = [&rows](Eigen::VectorXd v) -> bool {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& r : rows) v -= r.dot(v) * r;
    }
    const double len = v.norm();
    if (len < 0.5) return false;
    rows.push_back(v / len);
    return true;
  };
  std::vector<Eigen::VectorXd> raw = std::move(rows);
  rows.clear();
  for (auto& v : raw) orthonormalize(v / v.norm());
  for (std::size_t axis = 0; rows.size() < target_dim && axis < dim; ++axis) {
    orthonormalize(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(axis)));
  }

  basis.rows.reserve(target_dim);
  for (auto& r : rows) {
    const double peak = r.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      if (std::abs(r(j)) > 1e-12 * peak) {
        if (r(j) < 0.0) r = -r;
        break;
      }
    }
    basis.rows.emplace_back(r.data(), r.data() + r.size());
  }
  return basis;
}

Vector project(const ProjectionBasis& basis, std::span<const double> x) {
  if (x.size() != basis.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot project a vector of dimension " +
                                                   std::to_string(x.size()) + " with a basis for " +
                                                   std::to_string(basis.input_dim()));
  }
  Vector out(basis.output_dim(), 0.0);
  for (std::size_t c = 0; c < basis.output_dim(); ++c) {
    const auto& row = basis.rows[c];
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += row[j] * (x[j] - basis.mean[j]);
    out[c] = acc;
  }
  return out;
}

double hull_volume(std::span<const Vector> points) {
  if (points.empty()) return 0.0;
  const std::size_t d = common_dim(points);
  check_supported(d);
  if (d == 2) {
    std::vector<Point2> flat(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) flat[i] = {points[i][0], points[i][1]};
    return detail::hull_area_2d(flat);
  }
  std::vector<Point3> flat(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) flat[i] = {points[i][0], points[i][1], points[i][2]};
  return detail::hull_volume_3d(flat);
}

double divscore(std::span<const Vector> centers, std::size_t d) {
  check_supported(d);
  if (centers.size() < d + 1) return 0.0;
  common_dim(centers);
  const Eigen::MatrixXd a = centered_rows(centers, mean_of(centers));
  const auto scores = scores_from_gram(a * a.transpose(), d);
  return volume_of_scores(scores, d);
}

double divscore_swap(const ExemplarSet& centers, std::size_t slot, const FeatureVector& candidate,
                     std::size_t d) {
  if (slot >= centers.size()) {
    throw Error(ErrorCode::kSlotOutOfRange,
                "slot " + std::to_string(slot) + " of " + std::to_string(centers.size()));
  }
  std::vector<Vector> swapped = centers.exemplars;
  swapped[slot] = candidate.values;
  return divscore(swapped, d);
}

SwapVolumes swap_volumes(std::span<const Vector> centers, std::span<const double> candidate,
                         std::size_t d, SwapBasis policy) {
  check_supported(d);
  SwapVolumes out;
  out.swapped.assign(centers.size(), 0.0);
  if (centers.empty()) return out;
  const std::size_t dim = common_dim(centers);
  if (candidate.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "candidate of dimension " +
                                                   std::to_string(candidate.size()) + ", centers of " +
                                                   std::to_string(dim));
  }
  if (centers.size() < d + 1) return out;

  const auto k = static_cast<Eigen::Index>(centers.size());
  const Vector origin = mean_of(centers);
  const Eigen::MatrixXd a = centered_rows(centers, origin);
  Eigen::VectorXd shifted(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) shifted(static_cast<Eigen::Index>(j)) = candidate[j] - origin[j];
  const Eigen::MatrixXd gram = a * a.transpose();
  const Eigen::VectorXd cross_dots = a * shifted;  // (c_i - m) . (x - m)
  const double self_dot = shifted.squaredNorm();

  if (policy == SwapBasis::kPerSwap) {
    out.base = volume_of_scores(scores_from_gram(gram, d), d);
    Eigen::MatrixXd g = gram;
    for (Eigen::Index s = 0; s < k; ++s) {
      g.row(s) = cross_dots.transpose();
      g.col(s) = cross_dots;
      g(s, s) = self_dot;
      out.swapped[static_cast<std::size_t>(s)] = volume_of_scores(scores_from_gram(g, d), d);
      g.row(s) = gram.row(s);
      g.col(s) = gram.col(s);
    }
    return out;
  }

  // kPerFrame: one eigendecomposition; the candidate's scores follow from
  // u_c . (x - m) = v_c . A (x - m) / sqrt(lambda_c).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const auto& vals = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();
  const double largest = std::max(vals(k - 1), 0.0);
  std::vector<Point3> scores(static_cast<std::size_t>(k), Point3{0.0, 0.0, 0.0});
  Point3 cand{0.0, 0.0, 0.0};
  const auto axes = std::min<Eigen::Index>(static_cast<Eigen::Index>(d), k);
  for (Eigen::Index c = 0; c < axes; ++c) {
    const Eigen::Index col = k - 1 - c;
    const double lambda = std::max(vals(col), 0.0);
    const double scale = std::sqrt(lambda);
    for (Eigen::Index i = 0; i < k; ++i) scores[i][c] = scale * vecs(i, col);
    if (lambda > kRankTol * largest && lambda > 0.0) cand[c] = vecs.col(col).dot(cross_dots) / scale;
  }
  out.base = volume_of_scores(scores, d);
  for (Eigen::Index s = 0; s < k; ++s) {
    const Point3 kept = scores[s];
    scores[s] = cand;
    out.swapped[static_cast<std::size_t>(s)] = volume_of_scores(scores, d);
    scores[s] = kept;
  }
  return out;
}

}  // namespace divsamp
