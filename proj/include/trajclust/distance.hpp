#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trajclust/core.hpp"

namespace trajclust {

// Pairwise trajectory distances. All use Euclidean point-to-point distance
// on (x, y); timestamps are ignored. Every function is pure, symmetric and
// returns 0 for identical inputs.

/// Unconstrained DTW: sum of matched point distances along the cheapest
/// monotone warping path.
double dtw(std::span<const Point> a, std::span<const Point> b);

/// Length of the longest common subsequence where points match when their
/// distance is <= radius.
std::size_t lcss_length(std::span<const Point> a, std::span<const Point> b, double radius);

/// 1 - L / min(m_a, m_b), in [0, 1].
double lcss_distance(std::span<const Point> a, std::span<const Point> b, double radius);

/// Edit distance on real sequences: substitution costs 0 for points within
/// radius and 1 otherwise; insertions and deletions cost 1.
std::size_t edr(std::span<const Point> a, std::span<const Point> b, double radius);

/// Progress-windowed matching distance. For each point of one trajectory at
/// normalized progress u = i / (m - 1), take the nearest point of the other
/// among those whose progress lies within [u - w, u + w] (falling back to the
/// progress-nearest point when the window holds none); average these, then
/// average the two directions.
double pf(std::span<const Point> a, std::span<const Point> b, double window);

/// Symmetric point-set Hausdorff distance.
double hausdorff(std::span<const Point> a, std::span<const Point> b);

/// Segment-path distance: mean over points of `a` of the distance to the
/// polyline `b`. Not symmetric.
double spd(std::span<const Point> a, std::span<const Point> b);

/// (spd(a, b) + spd(b, a)) / 2.
double sspd(std::span<const Point> a, std::span<const Point> b);

double point_segment_distance(const Point& p, const Point& s0, const Point& s1);

/// Dispatches on DistanceSpec::kind.
double distance(const Trajectory& a, const Trajectory& b, const DistanceSpec& spec);

// ---------------------------------------------------------------------------

/// Dense symmetric matrix with zero diagonal and finite nonnegative entries.
class PairwiseMatrix {
 public:
  PairwiseMatrix() = default;
  /// Validates the invariants; throws DataError on violation.
  PairwiseMatrix(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }
  const std::vector<double>& values() const { return values_; }

  /// result(i, j) = this(order[i], order[j]).
  PairwiseMatrix reordered(std::span<const std::size_t> order) const;

  bool operator==(const PairwiseMatrix&) const = default;

 protected:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Euclidean distances between planar points.
PairwiseMatrix point_distance_matrix(std::span<const Point> points);

std::uint64_t dataset_fingerprint(const TrajectoryDataset& ds);

/// The matrix of one distance over one dataset.
class DistanceMatrix : public PairwiseMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(PairwiseMatrix values, DistanceSpec spec, std::uint64_t fingerprint);

  const DistanceSpec& spec() const { return spec_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// Rows and columns `indices` of this matrix, re-fingerprinted for `subset`.
  DistanceMatrix restricted(std::span<const std::size_t> indices,
                            const TrajectoryDataset& subset) const;

  bool operator==(const DistanceMatrix&) const = default;

 private:
  DistanceSpec spec_;
  std::uint64_t fingerprint_ = 0;
};

/// Computes the upper triangle with `workers` threads (0 = hardware
/// concurrency) and mirrors it. Result does not depend on the worker count.
/// Throws DataError naming the pair if any distance is not finite.
DistanceMatrix build_matrix(const TrajectoryDataset& ds, const DistanceSpec& spec,
                            unsigned workers = 1);

// Cache file: one ASCII header line
//   TRAJCLUST-DISTMAT 1 spec=<id> fingerprint=<16 hex> n=<n>\n
// followed by n*n little-endian IEEE-754 doubles, row-major.
void save_matrix(const std::filesystem::path& path, const DistanceMatrix& m);
DistanceMatrix load_matrix(const std::filesystem::path& path);
/// Loads and checks the header; throws CacheMismatchError on mismatch.
DistanceMatrix load_matrix(const std::filesystem::path& path, const DistanceSpec& spec,
                           std::uint64_t fingerprint);

/// File name used for a spec inside a cache directory.
std::string cache_file_name(const DistanceSpec& spec);

}  // namespace trajclust
