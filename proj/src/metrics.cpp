#include "trajclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "trajclust/error.hpp"

namespace trajclust {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Silhouette: return "S";
    case Measure::Completeness: return "completeness";
    case Measure::Homogeneity: return "homogeneity";
    case Measure::VMeasure: return "V";
    case Measure::AMI: return "AMI";
    case Measure::ARI: return "ARI";
    case Measure::FMI: return "FMI";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  for (auto m : kAllMeasures) {
    if (name == to_string(m)) return m;
  }
  if (name == "silhouette") return Measure::Silhouette;
  if (name == "v_measure") return Measure::VMeasure;
  throw ConfigError("unknown measure '" + std::string(name) + "'");
}

std::pair<double, double> measure_range(Measure m) {
  switch (m) {
    case Measure::Silhouette:
    case Measure::AMI:
    case Measure::ARI: return {-1.0, 1.0};
    default: return {0.0, 1.0};
  }
}

// ---------------------------------------------------------------------------

ContingencyTable::ContingencyTable(std::span<const int> reference, std::span<const int> predicted) {
  if (reference.size() != predicted.size()) {
    throw DataError("contingency table: " + std::to_string(reference.size()) +
                    " reference labels vs " + std::to_string(predicted.size()) + " predicted");
  }
  std::map<int, std::size_t> rows, cols;
  for (int l : reference) rows.emplace(l, 0);
  for (int l : predicted) cols.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [_, idx] : rows) idx = next++;
  next = 0;
  for (auto& [_, idx] : cols) idx = next++;

  row_sums_.assign(rows.size(), 0);
  col_sums_.assign(cols.size(), 0);
  counts_.assign(rows.size() * cols.size(), 0);
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const auto r = rows[reference[k]];
    const auto i = cols[predicted[k]];
    ++counts_[r * cols.size() + i];
    ++row_sums_[r];
    ++col_sums_[i];
  }
  total_ = reference.size();
}

ContingencyTable ContingencyTable::transposed() const {
  ContingencyTable t;
  t.row_sums_ = col_sums_;
  t.col_sums_ = row_sums_;
  t.total_ = total_;
  t.counts_.resize(counts_.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t i = 0; i < cols(); ++i) t.counts_[i * rows() + r] = count(r, i);
  }
  return t;
}

// ---------------------------------------------------------------------------

std::vector<double> silhouette_samples(const PairwiseMatrix& m, const ClusterAssignment& labels) {
  const auto n = m.size();
  if (labels.size() != n) throw DataError("silhouette: label count does not match the matrix");
  std::map<int, std::size_t> index;
  for (int l : labels.labels) {
    if (l != ClusterAssignment::kNoise) index.emplace(l, 0);
  }
  if (index.size() < 2) throw DataError("silhouette: fewer than 2 clusters");
  std::size_t next = 0;
  for (auto& [_, idx] : index) idx = next++;
  const auto k = index.size();

  std::vector<std::ptrdiff_t> cluster(n, -1);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels.labels[i] == ClusterAssignment::kNoise) continue;
    cluster[i] = static_cast<std::ptrdiff_t>(index[labels.labels[i]]);
    ++sizes[static_cast<std::size_t>(cluster[i])];
  }

  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (cluster[i] < 0) continue;
    const auto own = static_cast<std::size_t>(cluster[i]);
    if (sizes[own] == 1) {
      out[i] = 0.0;
      continue;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (cluster[j] >= 0) sums[static_cast<std::size_t>(cluster[j])] += m(i, j);
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    out[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return out;
}

double silhouette(const PairwiseMatrix& m, const ClusterAssignment& labels) {
  const auto s = silhouette_samples(m, labels);
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : s) {
    if (std::isnan(v)) continue;
    sum += v;
    ++count;
  }
  return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------------

double entropy_of_counts(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

double entropy(std::span<const int> labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::vector<std::size_t> v;
  for (const auto& [_, c] : counts) v.push_back(c);
  return entropy_of_counts(v);
}

namespace {

std::span<const std::size_t> row_sums(const ContingencyTable& t, std::vector<std::size_t>& buf) {
  buf.resize(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) buf[r] = t.row_sum(r);
  return buf;
}

std::span<const std::size_t> col_sums(const ContingencyTable& t, std::vector<std::size_t>& buf) {
  buf.resize(t.cols());
  for (std::size_t i = 0; i < t.cols(); ++i) buf[i] = t.col_sum(i);
  return buf;
}

// H(rows | cols) = -sum n_ri/n log(n_ri / n_i)
double conditional_entropy_rows(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total());
  double h = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t i = 0; i < t.cols(); ++i) {
      const auto c = t.count(r, i);
      if (c == 0) continue;
      const double nri = static_cast<double>(c);
      h -= nri / n * std::log(nri / static_cast<double>(t.col_sum(i)));
    }
  }
  return h;
}

double pairs(std::size_t c) {
  const auto v = static_cast<long double>(c);
  return static_cast<double>(v * (v - 1) / 2);
}

void require_pairs(const ContingencyTable& t, const char* name) {
  if (t.total() < 2) throw DataError(std::string(name) + ": needs at least 2 objects");
}

}  // namespace

HomogeneityCompleteness homogeneity_completeness_v(const ContingencyTable& table, double beta) {
  if (!(beta > 0.0)) throw ConfigError("V-measure: beta must be > 0");
  std::vector<std::size_t> buf;
  const double h_ref = entropy_of_counts(row_sums(table, buf));
  const double h_k = entropy_of_counts(col_sums(table, buf));

  HomogeneityCompleteness out{};
  out.homogeneity =
      h_ref == 0.0 ? 1.0 : std::clamp(1.0 - conditional_entropy_rows(table) / h_ref, 0.0, 1.0);
  out.completeness =
      h_k == 0.0 ? 1.0
                 : std::clamp(1.0 - conditional_entropy_rows(table.transposed()) / h_k, 0.0, 1.0);
  const double h = out.homogeneity;
  const double c = out.completeness;
  const double denom = beta * h + c;
  out.v_measure = denom > 0.0 ? (1.0 + beta) * h * c / denom : 0.0;
  return out;
}

double mutual_information(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total());
  double mi = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t i = 0; i < t.cols(); ++i) {
      const auto c = t.count(r, i);
      if (c == 0) continue;
      const double nri = static_cast<double>(c);
      const double outer = static_cast<double>(t.row_sum(r)) * static_cast<double>(t.col_sum(i));
      mi += nri / n * std::log(n * nri / outer);
    }
  }
  return std::max(mi, 0.0);
}

double expected_mutual_information(const ContingencyTable& t) {
  const auto n = t.total();
  const double nd = static_cast<double>(n);
  const auto lf = [](std::size_t x) { return std::lgamma(static_cast<double>(x) + 1.0); };
  const double lf_n = lf(n);
  double emi = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto a = t.row_sum(r);
    for (std::size_t i = 0; i < t.cols(); ++i) {
      const auto b = t.col_sum(i);
      const double fixed = lf(a) + lf(b) + lf(n - a) + lf(n - b) - lf_n;
      const std::size_t lo = std::max<std::size_t>(1, a + b > n ? a + b - n : 0);
      const std::size_t hi = std::min(a, b);
      for (std::size_t nij = lo; nij <= hi; ++nij) {
        const double log_p = fixed - lf(nij) - lf(a - nij) - lf(b - nij) - lf(n - a - b + nij);
        const double v = static_cast<double>(nij);
        emi += v / nd * std::log(nd * v / (static_cast<double>(a) * static_cast<double>(b))) *
               std::exp(log_p);
      }
    }
  }
  return emi;
}

double ami(const ContingencyTable& t) {
  std::vector<std::size_t> buf;
  const double h_ref = entropy_of_counts(row_sums(t, buf));
  const double h_k = entropy_of_counts(col_sums(t, buf));
  const double mi = mutual_information(t);
  const double emi = expected_mutual_information(t);
  const double mean_h = (h_ref + h_k) / 2.0;
  const double denom = mean_h - emi;
  // Degenerate marginals (both constant, or both all-singletons): every
  // table with these marginals is the same partition.
  const double tol = 1e-12 * std::max(1.0, mean_h);
  if (std::abs(denom) <= tol) return std::abs(mi - emi) <= tol ? 1.0 : 0.0;
  return (mi - emi) / denom;
}

double ari(const ContingencyTable& t) {
  require_pairs(t, "ARI");
  long double index = 0, a = 0, b = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t i = 0; i < t.cols(); ++i) index += pairs(t.count(r, i));
  }
  for (std::size_t r = 0; r < t.rows(); ++r) a += pairs(t.row_sum(r));
  for (std::size_t i = 0; i < t.cols(); ++i) b += pairs(t.col_sum(i));
  const long double total = pairs(t.total());
  // (index - E) / (max - E) with E = ab/total, scaled by total to stay in
  // integers as long as possible.
  const long double num = total * index - a * b;
  const long double den = total * (a + b) / 2 - a * b;
  if (den == 0) return 1.0;
  return static_cast<double>(num / den);
}

double fmi(const ContingencyTable& t) {
  require_pairs(t, "FMI");
  long double tp = 0, a = 0, b = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t i = 0; i < t.cols(); ++i) tp += pairs(t.count(r, i));
  }
  for (std::size_t r = 0; r < t.rows(); ++r) a += pairs(t.row_sum(r));
  for (std::size_t i = 0; i < t.cols(); ++i) b += pairs(t.col_sum(i));
  if (a == 0 && b == 0) return 1.0;
  if (tp == 0) return 0.0;
  return static_cast<double>(tp / std::sqrt(a * b));
}

// ---------------------------------------------------------------------------

std::vector<MeasureValue> Evaluation::list() const {
  std::vector<MeasureValue> out;
  for (auto m : kAllMeasures) out.push_back({m, values[index_of(m)]});
  return out;
}

Evaluation evaluate_labels(const PairwiseMatrix& m, const ClusterAssignment& predicted,
                           std::span<const int> reference) {
  const auto n = m.size();
  if (predicted.size() != n || reference.size() != n) {
    throw DataError("evaluate: " + std::to_string(predicted.size()) + " predicted and " +
                    std::to_string(reference.size()) + " reference labels for " +
                    std::to_string(n) + " objects");
  }
  if (n < 2) throw DataError("evaluate: needs at least 2 objects");
  Evaluation e;
  e.noise_fraction = static_cast<double>(predicted.noise_count()) / static_cast<double>(n);

  const ContingencyTable table(reference, predicted.labels);
  const auto hcv = homogeneity_completeness_v(table);
  auto& v = e.values;
  v[index_of(Measure::Silhouette)] = predicted.cluster_count() >= 2
                                         ? silhouette(m, predicted)
                                         : std::numeric_limits<double>::quiet_NaN();
  v[index_of(Measure::Completeness)] = hcv.completeness;
  v[index_of(Measure::Homogeneity)] = hcv.homogeneity;
  v[index_of(Measure::VMeasure)] = hcv.v_measure;
  v[index_of(Measure::AMI)] = ami(table);
  v[index_of(Measure::ARI)] = ari(table);
  v[index_of(Measure::FMI)] = fmi(table);
  return e;
}

Evaluation evaluate_all(const TrajectoryDataset& subset, const DistanceMatrix& matrix,
                        const ClusterAssignment& predicted, const ReferenceClusters& ref) {
  const auto retained = ref.retained_indices();
  if (retained.size() != subset.size()) {
    throw DataError("evaluate: reference retains " + std::to_string(retained.size()) +
                    " trajectories, subset holds " + std::to_string(subset.size()));
  }
  for (std::size_t k = 0; k < retained.size(); ++k) {
    if (ref.entries[retained[k]].trajectory_id != subset[k].id) {
      throw DataError("evaluate: trajectory '" + subset[k].id +
                      "' does not match the reference at position " + std::to_string(k));
    }
  }
  if (matrix.size() != subset.size() || matrix.fingerprint() != dataset_fingerprint(subset)) {
    throw DataError("evaluate: distance matrix does not belong to the retained subset");
  }
  return evaluate_labels(matrix, predicted, ref.retained_labels());
}

}  // namespace trajclust
