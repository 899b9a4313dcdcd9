#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajclust/core.hpp"

namespace trajclust {

inline constexpr double kDefaultOdThreshold = 0.01;
inline constexpr std::size_t kDefaultElbowMinK = 2;
inline constexpr std::size_t kDefaultElbowMaxK = 16;  // exclusive

/// Agglomerative clustering with average linkage on Euclidean point
/// distances: the default algorithm for clustering origins and destinations.
AlgorithmSpec default_endpoint_algorithm();

/// Mean within-cluster point-to-centroid distance for each k in
/// [k_min, k_max), averaged over replications on permuted inputs.
struct ElbowCurve {
  std::size_t k_min = 0;
  std::vector<double> mean;  // d-bar per k
  std::vector<double> stddev;

  std::size_t k_max() const { return k_min + mean.size(); }  // exclusive
  double at(std::size_t k) const { return mean.at(k - k_min); }
};

/// d-bar = sum over clusters of sum over members of ||p - centroid|| / |points|.
double mean_centroid_distance(std::span<const Point> points, const ClusterAssignment& labels);

/// Clusters the points for every k in [k_min, k_max) with `algorithm`.
/// Replication r > 0 clusters a seeded permutation of the points (stddev is
/// zero for order-independent algorithms). Throws ConfigError when
/// k_max > |points| + 1, k_min < 2, or the algorithm does not take k.
ElbowCurve endpoint_elbow(std::span<const Point> points, std::size_t k_min, std::size_t k_max,
                          const AlgorithmSpec& algorithm = default_endpoint_algorithm(),
                          std::size_t replications = 1, std::uint64_t seed = 0);

/// k maximizing the second difference d[k-1] - 2 d[k] + d[k+1] over interior
/// k, lowest k on ties. `override_k` always wins. Throws ConfigError for
/// curves with fewer than 3 entries.
std::size_t pick_elbow(const ElbowCurve& curve, std::optional<std::size_t> override_k = {});

struct ReferenceClusters {
  struct Entry {
    std::string trajectory_id;
    int origin_cluster;
    int destination_cluster;
    int od_label;  // -1 when the OD pair was dropped
    bool retained;
  };

  /// One entry per input trajectory, in input order.
  std::vector<Entry> entries;
  std::size_t k_origin = 0;
  std::size_t k_destination = 0;
  double epsilon = kDefaultOdThreshold;
  /// Number of retained OD pairs.
  std::size_t cluster_count = 0;

  /// Indices (into the input dataset) of retained trajectories, in input order.
  std::vector<std::size_t> retained_indices() const;
  /// od_label of retained trajectories, aligned with retained_indices().
  std::vector<int> retained_labels() const;
  std::size_t retained_count() const;
};

/// Labels each trajectory by its (origin cluster, destination cluster) and
/// keeps OD pairs holding at least epsilon * |ds| trajectories. Endpoint
/// clustering runs on the id-sorted dataset so that the result does not
/// depend on input order. Retained pairs get od_label 0, 1, ... in
/// lexicographic (origin, destination) order.
ReferenceClusters build_reference(const TrajectoryDataset& ds, std::size_t k_origin,
                                  std::size_t k_destination,
                                  const AlgorithmSpec& algorithm = default_endpoint_algorithm(),
                                  double epsilon = kDefaultOdThreshold);

/// The dataset D-tilde: retained trajectories in input order.
TrajectoryDataset retained_subset(const TrajectoryDataset& ds, const ReferenceClusters& ref);

/// `track_id,origin_cluster,destination_cluster,od_label,retained`
void write_reference_csv(const std::filesystem::path& path, const ReferenceClusters& ref);
ReferenceClusters read_reference_csv(const std::filesystem::path& path);

void write_elbow_csv(const std::filesystem::path& path, const ElbowCurve& curve);

}  // namespace trajclust
