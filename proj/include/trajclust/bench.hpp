#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajclust/core.hpp"
#include "trajclust/metrics.hpp"
#include "trajclust/reference.hpp"

namespace trajclust {

inline constexpr std::size_t kDefaultPermutations = 10;
inline constexpr double kDefaultCorrelationThreshold = 0.75;
inline constexpr std::size_t kTopSetupCount = 10;

/// Distances x algorithms x k. DBSCAN and OPTICS entries ignore the k range.
struct SetupGrid {
  std::vector<DistanceSpec> distances;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t k_min = kMinClusterCount;  // inclusive
  std::size_t k_max = kMaxClusterCount;  // inclusive

  /// DTW; LCSS and EDR with r_b in {1,2,3,5,7,10}; PF with
  /// w in {0.01,0.05,0.1,0.2,0.3,0.5}; Hausdorff; SSPD.
  static std::vector<DistanceSpec> default_distances();
  /// k-medoids, agglomerative with each linkage, spectral.
  static std::vector<AlgorithmSpec> default_algorithms();
  static SetupGrid defaults();

  void validate() const;
  /// Every setup, distance-major, then algorithm, then k.
  std::vector<ClusteringSetup> setups() const;
};

struct PerformanceRecord {
  ClusteringSetup setup;
  Measure measure;
  /// One value per permutation; NaN where the run failed or the measure is
  /// undefined.
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;
  double lower = 0.0;
  /// Mean fraction of noise objects in the predictions.
  double noise_fraction = 0.0;
};

/// Fills mean, sample stddev and lower bound from `values` (NaN if any value is NaN).
void summarize(PerformanceRecord& record);

struct SetupFailure {
  std::string setup_id;
  std::size_t permutation;
  std::string message;
};

struct BenchmarkOptions {
  std::size_t permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  /// Threads for matrix building and the sweep; 0 = hardware concurrency.
  unsigned workers = 1;
  /// Directory of cached matrices over the full dataset. Missing files are
  /// built and written; stale files raise CacheMismatchError.
  std::optional<std::filesystem::path> cache_dir;
  std::function<void(const std::string&)> log;
};

struct BenchmarkResult {
  std::size_t permutations = 0;
  std::vector<ClusteringSetup> setups;
  /// setups.size() * kMeasureCount records, setup-major, measure order of kAllMeasures.
  std::vector<PerformanceRecord> records;
  std::vector<SetupFailure> failures;

  const PerformanceRecord& record(std::size_t setup, Measure m) const {
    return records[setup * kMeasureCount + index_of(m)];
  }
  /// True when every run of every setup failed.
  bool all_failed() const;
};

/// Permutation l reorders D-tilde with seed derive_seed(seed, {l}); the same
/// orderings are used for every distance. Stochastic algorithms receive
/// derive_seed(seed, {l, spec seed}). Labels are mapped back to the original
/// order before evaluation, so results do not depend on the worker count.
BenchmarkResult run_benchmark(const TrajectoryDataset& ds, const ReferenceClusters& ref,
                              const SetupGrid& grid, const BenchmarkOptions& options = {});

/// Two-sided 95 % Student t quantile with df = n - 1.
double t_multiplier(std::size_t n);
/// mean - t * s / sqrt(n), s the sample standard deviation. Throws ConfigError for n < 2.
double lower_bound(std::span<const double> values);

/// Measures dropped first when two of them correlate.
inline constexpr std::array<Measure, kMeasureCount> kDefaultDropPriority = {
    Measure::VMeasure, Measure::FMI,         Measure::AMI,       Measure::ARI,
    Measure::Completeness, Measure::Homogeneity, Measure::Silhouette};

struct CorrelationMatrix {
  /// Pearson correlation of per-setup means; NaN where a measure is constant.
  std::array<std::array<double, kMeasureCount>, kMeasureCount> rho{};
};

CorrelationMatrix measure_correlations(std::span<const PerformanceRecord> records);

/// Repeatedly takes the remaining pair with the largest |rho| above
/// `threshold` and drops whichever member comes first in `drop_priority`.
/// Returns the retained measures in kAllMeasures order. Throws DataError
/// with fewer than 2 setups.
std::vector<Measure> prune_correlated(std::span<const PerformanceRecord> records,
                                      double threshold = kDefaultCorrelationThreshold,
                                      std::span<const Measure> drop_priority = kDefaultDropPriority);

struct RankTable {
  /// Sorted by setup id.
  std::vector<ClusteringSetup> setups;
  std::vector<Measure> retained;
  /// ranks[s][measure index]; NaN for measures not retained.
  std::vector<std::array<double, kMeasureCount>> ranks;
  std::vector<double> average_rank;
  /// Indices into `setups`, best average rank first, ties by setup id.
  std::vector<std::size_t> order;
  std::vector<std::size_t> top;
};

/// Ranks setups on each retained measure by lower bound, descending; NaN
/// lower bounds rank last; ties share the average rank. Throws DataError when
/// a (setup, measure) record is missing.
RankTable rank_setups(std::span<const PerformanceRecord> records, std::span<const Measure> retained,
                      std::size_t top_count = kTopSetupCount);

struct TopFrequencies {
  std::map<std::string, double> distance;
  std::map<std::string, double> algorithm;
  /// Number of setups the proportions are taken over.
  std::size_t considered = 0;
  /// Set when fewer than the requested number of setups were ranked.
  std::optional<std::string> warning;
};

/// Proportion of each distance kind and algorithm kind among the top setups.
TopFrequencies top_frequencies(const RankTable& table);

// --- reports ---------------------------------------------------------------

struct BenchmarkReport {
  BenchmarkResult result;
  CorrelationMatrix correlations;
  std::vector<Measure> retained;
  RankTable ranks;
  TopFrequencies frequencies;
};

BenchmarkReport analyze(BenchmarkResult result, double threshold = kDefaultCorrelationThreshold);

/// `setup_id,permutation,measure,value`
void write_results_csv(const std::filesystem::path& path, const BenchmarkResult& result);
/// `setup_id,measure,mean,std,lower_bound,noise_fraction`
void write_summary_csv(const std::filesystem::path& path, const BenchmarkResult& result);
/// `setup_id,<rank per retained measure>,average_rank`
void write_ranks_csv(const std::filesystem::path& path, const RankTable& table);
/// Writes results.csv, summary.csv, ranks.csv and report.json into `dir`;
/// returns the written paths.
std::vector<std::filesystem::path> write_reports(const std::filesystem::path& dir,
                                                 const BenchmarkReport& report);

}  // namespace trajclust
