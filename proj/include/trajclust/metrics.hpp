#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajclust/core.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/reference.hpp"

namespace trajclust {

enum class Measure { Silhouette, Completeness, Homogeneity, VMeasure, AMI, ARI, FMI };

inline constexpr std::size_t kMeasureCount = 7;
inline constexpr std::array<Measure, kMeasureCount> kAllMeasures = {
    Measure::Silhouette, Measure::Completeness, Measure::Homogeneity, Measure::VMeasure,
    Measure::AMI,        Measure::ARI,          Measure::FMI};

/// "S", "completeness", "homogeneity", "V", "AMI", "ARI", "FMI".
std::string_view to_string(Measure m);
Measure parse_measure(std::string_view name);
inline std::size_t index_of(Measure m) { return static_cast<std::size_t>(m); }

struct MeasureValue {
  Measure measure;
  double value;
};

/// Closed range of valid values for a measure.
std::pair<double, double> measure_range(Measure m);

/// Counts n_{r,i} of objects in reference cluster r and predicted cluster i.
/// Labels are arbitrary integers (noise included); rows and columns follow
/// ascending label value.
class ContingencyTable {
 public:
  ContingencyTable(std::span<const int> reference, std::span<const int> predicted);

  std::size_t rows() const { return row_sums_.size(); }
  std::size_t cols() const { return col_sums_.size(); }
  std::size_t count(std::size_t r, std::size_t i) const { return counts_[r * cols() + i]; }
  std::size_t row_sum(std::size_t r) const { return row_sums_[r]; }
  std::size_t col_sum(std::size_t i) const { return col_sums_[i]; }
  std::size_t total() const { return total_; }

  ContingencyTable transposed() const;

 private:
  ContingencyTable() = default;

  std::vector<std::size_t> counts_;
  std::vector<std::size_t> row_sums_;
  std::vector<std::size_t> col_sums_;
  std::size_t total_ = 0;
};

/// Per-object silhouette over non-noise objects; NaN for noise objects.
/// Throws DataError with fewer than 2 non-noise clusters.
std::vector<double> silhouette_samples(const PairwiseMatrix& m, const ClusterAssignment& labels);
/// Mean of silhouette_samples over non-noise objects.
double silhouette(const PairwiseMatrix& m, const ClusterAssignment& labels);

double entropy(std::span<const int> labels);
double entropy_of_counts(std::span<const std::size_t> counts);

struct HomogeneityCompleteness {
  double homogeneity;
  double completeness;
  double v_measure;
};

inline constexpr double kDefaultBeta = 1.0;

/// Rows of the table are the reference, columns the prediction.
HomogeneityCompleteness homogeneity_completeness_v(const ContingencyTable& table,
                                                    double beta = kDefaultBeta);

double mutual_information(const ContingencyTable& table);
/// Expectation of MI over all tables with the same marginals under the
/// hypergeometric model.
double expected_mutual_information(const ContingencyTable& table);
double ami(const ContingencyTable& table);
/// Throws DataError for n < 2.
double ari(const ContingencyTable& table);
/// Throws DataError for n < 2.
double fmi(const ContingencyTable& table);

struct Evaluation {
  std::array<double, kMeasureCount> values{};
  double noise_fraction = 0.0;

  double operator[](Measure m) const { return values[index_of(m)]; }
  std::vector<MeasureValue> list() const;
};

/// All seven measures for `predicted` against `reference`, both aligned with
/// the rows of `m`. Noise objects form one extra predicted cluster for the
/// supervised measures and are left out of the silhouette. The silhouette is
/// NaN when fewer than 2 non-noise clusters exist; n < 2 throws.
Evaluation evaluate_labels(const PairwiseMatrix& m, const ClusterAssignment& predicted,
                           std::span<const int> reference);

/// Evaluates a clustering of D-tilde. `subset` must hold exactly the
/// retained trajectories of `ref` in order and `matrix` must belong to it;
/// otherwise DataError.
Evaluation evaluate_all(const TrajectoryDataset& subset, const DistanceMatrix& matrix,
                        const ClusterAssignment& predicted, const ReferenceClusters& ref);

}  // namespace trajclust
