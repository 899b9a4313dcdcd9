#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trajclust {

/// A timestamped planar position. Coordinates in meters, time in seconds.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  bool operator==(const Point&) const = default;
};

double euclidean(const Point& a, const Point& b);

/// Time-ordered sequence of positions of one road user.
///
/// Plain value type: invariants (length >= 2, strictly increasing t, finite
/// values) are checked by validate_dataset() and enforced at ingestion, not
/// at construction, so that the pairwise distances remain usable on
/// arbitrary point sequences.
struct Trajectory {
  std::string id;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct TrajectoryDataset {
  std::vector<Trajectory> trajectories;
  std::string site_id;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  const Trajectory& operator[](std::size_t i) const { return trajectories[i]; }
  bool operator==(const TrajectoryDataset&) const = default;
};

inline constexpr std::size_t kMinTrajectoryLength = 2;

const Point& origin(const Trajectory& traj);
const Point& destination(const Trajectory& traj);

enum class ViolationRule { DuplicateId, TooShort, TimestampOrder, NonFinite };

std::string_view to_string(ViolationRule rule);

struct Violation {
  std::string trajectory_id;
  ViolationRule rule;
  std::string detail;
};

/// Returns one entry per broken invariant; empty iff the dataset is clean.
std::vector<Violation> validate_dataset(const TrajectoryDataset& ds);
std::vector<Violation> validate_trajectory(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Setup description types. These live here rather than in the distance and
// cluster modules because a ClusteringSetup is built from both.

enum class DistanceKind { DTW, LCSS, EDR, PF, Hausdorff, SSPD };

std::string_view to_string(DistanceKind kind);
DistanceKind parse_distance_kind(std::string_view name);

struct DistanceSpec {
  DistanceKind kind = DistanceKind::DTW;
  /// Matching threshold r_b in meters (LCSS, EDR).
  std::optional<double> radius;
  /// Progress window w in (0, 1] (PF).
  std::optional<double> window;
  /// Divide EDR by max(m_a, m_b). Off by default.
  bool normalize_edr = false;

  static DistanceSpec dtw() { return {DistanceKind::DTW, {}, {}, false}; }
  static DistanceSpec lcss(double r) { return {DistanceKind::LCSS, r, {}, false}; }
  static DistanceSpec edr(double r, bool normalized = false) {
    return {DistanceKind::EDR, r, {}, normalized};
  }
  static DistanceSpec pf(double w) { return {DistanceKind::PF, {}, w, false}; }
  static DistanceSpec hausdorff() { return {DistanceKind::Hausdorff, {}, {}, false}; }
  static DistanceSpec sspd() { return {DistanceKind::SSPD, {}, {}, false}; }

  /// Throws ConfigError when parameters do not match the kind.
  void validate() const;
  /// Stable identifier, e.g. "LCSS[r_b=2]". Contains no commas.
  std::string id() const;

  auto operator<=>(const DistanceSpec&) const = default;
};

enum class AlgorithmKind { KMedoids, Agglomerative, Spectral, DBSCAN, OPTICS };
enum class Linkage { Complete, Average, Single };

std::string_view to_string(AlgorithmKind kind);
std::string_view to_string(Linkage linkage);
AlgorithmKind parse_algorithm_kind(std::string_view name);
Linkage parse_linkage(std::string_view name);

/// True for algorithms that take the number of clusters as an input.
bool requires_cluster_count(AlgorithmKind kind);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::Agglomerative;
  std::optional<Linkage> linkage;           // Agglomerative
  std::optional<std::size_t> min_points;    // DBSCAN, OPTICS: n_z^min
  std::optional<double> radius;             // DBSCAN: d_z
  std::optional<std::uint64_t> seed;        // KMedoids, Spectral

  static AlgorithmSpec kmedoids(std::uint64_t seed = 0) {
    return {AlgorithmKind::KMedoids, {}, {}, {}, seed};
  }
  static AlgorithmSpec agglomerative(Linkage l) {
    return {AlgorithmKind::Agglomerative, l, {}, {}, {}};
  }
  static AlgorithmSpec spectral(std::uint64_t seed = 0) {
    return {AlgorithmKind::Spectral, {}, {}, {}, seed};
  }
  static AlgorithmSpec dbscan(double d_z, std::size_t n_z_min) {
    return {AlgorithmKind::DBSCAN, {}, n_z_min, d_z, {}};
  }
  static AlgorithmSpec optics(std::size_t n_z_min) {
    return {AlgorithmKind::OPTICS, {}, n_z_min, {}, {}};
  }

  void validate() const;
  std::string id() const;

  auto operator<=>(const AlgorithmSpec&) const = default;
};

inline constexpr std::size_t kMinClusterCount = 2;
inline constexpr std::size_t kMaxClusterCount = 30;

/// One point of the search space: distance, its parameter, algorithm, its
/// parameters and, for k-consuming algorithms, the number of clusters.
struct ClusteringSetup {
  DistanceSpec distance;
  AlgorithmSpec algorithm;
  std::optional<std::size_t> cluster_count;

  void validate() const;
  /// e.g. "SSPD/Agglomerative[linkage=average]/k=8"
  std::string id() const;

  auto operator<=>(const ClusteringSetup&) const = default;
};

/// Per-object labels. Density-based algorithms may emit kNoise.
struct ClusterAssignment {
  static constexpr int kNoise = -1;

  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  /// Number of distinct non-noise labels.
  std::size_t cluster_count() const;
  std::size_t noise_count() const;

  bool operator==(const ClusterAssignment&) const = default;
};

}  // namespace trajclust

template <>
struct std::hash<trajclust::ClusteringSetup> {
  std::size_t operator()(const trajclust::ClusteringSetup& s) const noexcept {
    return std::hash<std::string>{}(s.id());
  }
};
