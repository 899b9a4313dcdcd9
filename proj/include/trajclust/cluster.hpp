#pragma once

#include <cstddef>
#include <filesystem>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "trajclust/core.hpp"
#include "trajclust/distance.hpp"

namespace trajclust {

// Clustering algorithms driven by a precomputed pairwise matrix. Unless noted
// otherwise ties are broken towards the lowest object index, which makes
// every algorithm a deterministic function of (matrix, parameters, seed).

// --- k-medoids -------------------------------------------------------------

inline constexpr std::size_t kKMedoidsMaxIterations = 300;

struct KMedoidsOptions {
  std::uint64_t seed = 0;
  std::size_t max_iterations = kKMedoidsMaxIterations;
  /// Independent seeded initializations; the lowest final cost wins.
  std::size_t restarts = 3;
};

struct KMedoidsResult {
  ClusterAssignment assignment;
  std::vector<std::size_t> medoids;
  /// Sum of object-to-medoid distances after each assignment step of the
  /// winning run.
  std::vector<double> cost_history;
  std::size_t iterations = 0;
};

/// Alternating k-medoids: assign to nearest medoid, move each medoid to the
/// member minimizing total within-cluster distance, until the medoid set is
/// stable. A medoid left without members takes over the object farthest
/// from its own medoid. Medoids start from seeded D^2 sampling without
/// replacement. Throws ConfigError unless 2 <= k <= n.
KMedoidsResult kmedoids_detailed(const PairwiseMatrix& m, std::size_t k,
                                 const KMedoidsOptions& options = {});
ClusterAssignment kmedoids(const PairwiseMatrix& m, std::size_t k, std::uint64_t seed = 0);

// --- agglomerative ---------------------------------------------------------

struct Merge {
  std::size_t left;   // representative (lowest member index) of the kept cluster
  std::size_t right;  // representative of the absorbed cluster
  double height;
};

/// Full merge sequence (n - 1 merges) under Lance-Williams updates; the
/// closest pair is merged first, ties going to the lexicographically lowest
/// pair of representatives.
std::vector<Merge> linkage_tree(const PairwiseMatrix& m, Linkage linkage);

/// Labels after the first n - k merges; cluster ids in order of first member.
ClusterAssignment cut_tree(const std::vector<Merge>& merges, std::size_t n, std::size_t k);

ClusterAssignment agglomerative(const PairwiseMatrix& m, std::size_t k, Linkage linkage);

// --- spectral --------------------------------------------------------------

/// Eigen-decomposition of the symmetric normalized Laplacian of the Gaussian
/// affinity exp(-d^2 / (2 sigma^2)), sigma = median off-diagonal distance.
/// Computed once and reused for every k.
class SpectralEmbedding {
 public:
  /// Throws DataError when every off-diagonal distance is zero.
  explicit SpectralEmbedding(const PairwiseMatrix& m);

  double sigma() const { return sigma_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  std::size_t size() const { return static_cast<std::size_t>(eigenvectors_.rows()); }

  /// Row-normalized first-k eigenvectors, clustered by seeded k-means.
  ClusterAssignment cluster(std::size_t k, std::uint64_t seed) const;

 private:
  double sigma_ = 0.0;
  Eigen::VectorXd eigenvalues_;   // ascending
  Eigen::MatrixXd eigenvectors_;  // columns match eigenvalues_
};

ClusterAssignment spectral(const PairwiseMatrix& m, std::size_t k, std::uint64_t seed = 0);

/// Seeded k-means++ / Lloyd on the rows of `points`, best of `restarts`.
/// Exposed for tests; spectral clustering uses it on the embedding.
ClusterAssignment kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                         std::size_t restarts = 10, std::size_t max_iterations = 300);

// --- density-based ---------------------------------------------------------

/// Neighborhoods are {j : d(i, j) <= radius}, the object itself included;
/// cores hold at least min_points neighbors. Clusters are numbered in the
/// order their first core is met scanning objects by index; a border point
/// reachable from several clusters joins the first to reach it.
ClusterAssignment dbscan(const PairwiseMatrix& m, double radius, std::size_t min_points);

inline constexpr double kOpticsXi = 0.05;

struct OpticsOrdering {
  std::vector<std::size_t> ordering;
  std::vector<double> reachability;  // by object; +inf when undefined
  std::vector<double> core_distance; // by object; +inf when not a core
  std::vector<std::ptrdiff_t> predecessor;  // by object; -1 when none
};

/// OPTICS with unbounded radius. Core distance is the distance to the
/// min_points-th nearest object counting the object itself. The next object
/// is the unprocessed one with the smallest (reachability, core distance,
/// index).
OpticsOrdering optics_ordering(const PairwiseMatrix& m, std::size_t min_points);

/// Xi-steepness cluster extraction with predecessor correction; minimum
/// cluster size equals min_points. Returns [start, end] ranges over the
/// ordering, innermost clusters first.
std::vector<std::pair<std::size_t, std::size_t>> optics_xi_clusters(const OpticsOrdering& o,
                                                                    double xi,
                                                                    std::size_t min_points);

ClusterAssignment optics(const PairwiseMatrix& m, std::size_t min_points, double xi = kOpticsXi);

// --- dispatch --------------------------------------------------------------

/// Runs `setup` on a matrix built over `ds`. Throws CacheMismatchError when
/// the matrix was built for other data and ConfigError on invalid setups.
ClusterAssignment run_setup(const TrajectoryDataset& ds, const DistanceMatrix& matrix,
                            const ClusteringSetup& setup);

/// Algorithm-level dispatch without the dataset check.
ClusterAssignment run_algorithm(const PairwiseMatrix& m, const AlgorithmSpec& spec,
                                std::optional<std::size_t> k);

/// Relabels so that cluster ids appear in order of first occurrence; noise
/// stays noise.
ClusterAssignment canonical_labels(const ClusterAssignment& a);

/// `track_id,label`, noise as -1. Throws DataError on size mismatch.
void write_assignment_csv(const std::filesystem::path& path, const TrajectoryDataset& ds,
                          const ClusterAssignment& labels);

}  // namespace trajclust
