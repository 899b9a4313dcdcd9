#include "trajclust/reference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "text_util.hpp"
#include "trajclust/cluster.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/error.hpp"
#include "trajclust/random.hpp"

namespace trajclust {

AlgorithmSpec default_endpoint_algorithm() { return AlgorithmSpec::agglomerative(Linkage::Average); }

double mean_centroid_distance(std::span<const Point> points, const ClusterAssignment& labels) {
  if (labels.size() != points.size()) throw DataError("elbow: label count does not match points");
  if (points.empty()) return 0.0;
  struct Acc {
    double x = 0, y = 0;
    std::size_t n = 0;
  };
  std::map<int, Acc> centroids;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& c = centroids[labels.labels[i]];
    c.x += points[i].x;
    c.y += points[i].y;
    ++c.n;
  }
  for (auto& [_, c] : centroids) {
    c.x /= static_cast<double>(c.n);
    c.y /= static_cast<double>(c.n);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& c = centroids[labels.labels[i]];
    total += std::hypot(points[i].x - c.x, points[i].y - c.y);
  }
  return total / static_cast<double>(points.size());
}

namespace {

// d-bar for every k on one ordering of the points.
std::vector<double> elbow_pass(std::span<const Point> points, std::size_t k_min, std::size_t k_max,
                               const AlgorithmSpec& algorithm) {
  const auto m = point_distance_matrix(points);
  std::vector<double> out;
  if (algorithm.kind == AlgorithmKind::Agglomerative) {
    algorithm.validate();
    const auto merges = linkage_tree(m, *algorithm.linkage);
    for (auto k = k_min; k < k_max; ++k) {
      out.push_back(mean_centroid_distance(points, cut_tree(merges, points.size(), k)));
    }
  } else {
    for (auto k = k_min; k < k_max; ++k) {
      out.push_back(mean_centroid_distance(points, run_algorithm(m, algorithm, k)));
    }
  }
  return out;
}

}  // namespace

ElbowCurve endpoint_elbow(std::span<const Point> points, std::size_t k_min, std::size_t k_max,
                          const AlgorithmSpec& algorithm, std::size_t replications,
                          std::uint64_t seed) {
  if (!requires_cluster_count(algorithm.kind)) {
    throw ConfigError("elbow: " + std::string(to_string(algorithm.kind)) + " does not take k");
  }
  if (k_min < kMinClusterCount) throw ConfigError("elbow: k_min must be >= 2");
  if (k_max <= k_min) throw ConfigError("elbow: empty k range");
  if (k_max > points.size() + 1) {
    throw ConfigError("elbow: k_max=" + std::to_string(k_max) + " exceeds " +
                      std::to_string(points.size()) + " points");
  }
  replications = std::max<std::size_t>(1, replications);

  std::vector<std::vector<double>> runs;
  runs.push_back(elbow_pass(points, k_min, k_max, algorithm));
  std::vector<Point> shuffled(points.size());
  for (std::size_t r = 1; r < replications; ++r) {
    const auto order = random_permutation(points.size(), derive_seed(seed, {r}));
    for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = points[order[i]];
    runs.push_back(elbow_pass(shuffled, k_min, k_max, algorithm));
  }

  ElbowCurve curve;
  curve.k_min = k_min;
  const auto len = k_max - k_min;
  curve.mean.assign(len, 0.0);
  curve.stddev.assign(len, 0.0);
  const double n = static_cast<double>(runs.size());
  for (std::size_t j = 0; j < len; ++j) {
    double sum = 0.0;
    for (const auto& run : runs) sum += run[j];
    curve.mean[j] = sum / n;
    if (runs.size() > 1) {
      double sq = 0.0;
      for (const auto& run : runs) sq += (run[j] - curve.mean[j]) * (run[j] - curve.mean[j]);
      curve.stddev[j] = std::sqrt(sq / (n - 1.0));
    }
  }
  return curve;
}

std::size_t pick_elbow(const ElbowCurve& curve, std::optional<std::size_t> override_k) {
  if (override_k) return *override_k;
  const auto& d = curve.mean;
  if (d.size() < 3) throw ConfigError("elbow: curve needs at least 3 entries");
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  std::size_t best = 1;
  double best_value = d[0] - 2.0 * d[1] + d[2];
  for (std::size_t j = 2; j + 1 < d.size(); ++j) {
    const double v = d[j - 1] - 2.0 * d[j] + d[j + 1];
    if (v > best_value + tol) {
      best_value = v;
      best = j;
    }
  }
  return curve.k_min + best;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> ReferenceClusters::retained_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].retained) out.push_back(i);
  }
  return out;
}

std::vector<int> ReferenceClusters::retained_labels() const {
  std::vector<int> out;
  for (const auto& e : entries) {
    if (e.retained) out.push_back(e.od_label);
  }
  return out;
}

std::size_t ReferenceClusters::retained_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const Entry& e) { return e.retained; }));
}

ReferenceClusters build_reference(const TrajectoryDataset& ds, std::size_t k_origin,
                                  std::size_t k_destination, const AlgorithmSpec& algorithm,
                                  double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("reference: epsilon must lie in [0, 1)");
  if (!requires_cluster_count(algorithm.kind)) {
    throw ConfigError("reference: " + std::string(to_string(algorithm.kind)) + " does not take k");
  }
  const auto n = ds.size();
  if (k_origin > n || k_destination > n) {
    throw ConfigError("reference: k_O=" + std::to_string(k_origin) + ", k_D=" +
                      std::to_string(k_destination) + " exceed the " + std::to_string(n) +
                      " trajectories");
  }
  for (const auto& t : ds.trajectories) {
    if (t.points.empty()) throw DataError("reference: trajectory '" + t.id + "' is empty");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ds[a].id < ds[b].id; });
  for (std::size_t i = 1; i < n; ++i) {
    if (ds[order[i]].id == ds[order[i - 1]].id) {
      throw DataError("reference: duplicate trajectory id '" + ds[order[i]].id + "'");
    }
  }

  const auto cluster_endpoints = [&](bool first, std::size_t k) {
    std::vector<Point> pts;
    pts.reserve(n);
    for (auto i : order) pts.push_back(first ? origin(ds[i]) : destination(ds[i]));
    const auto sorted_labels =
        canonical_labels(run_algorithm(point_distance_matrix(pts), algorithm, k));
    std::vector<int> labels(n);
    for (std::size_t j = 0; j < n; ++j) labels[order[j]] = sorted_labels.labels[j];
    return labels;
  };
  const auto o = cluster_endpoints(true, k_origin);
  const auto d = cluster_endpoints(false, k_destination);

  std::map<std::pair<int, int>, std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) ++counts[{o[i], d[i]}];
  const double threshold = epsilon * static_cast<double>(n);
  std::map<std::pair<int, int>, int> od_label;
  int next = 0;
  for (const auto& [pair, count] : counts) {
    if (static_cast<double>(count) >= threshold) od_label[pair] = next++;
  }

  ReferenceClusters ref;
  ref.k_origin = k_origin;
  ref.k_destination = k_destination;
  ref.epsilon = epsilon;
  ref.cluster_count = od_label.size();
  ref.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = od_label.find({o[i], d[i]});
    const bool kept = it != od_label.end();
    ref.entries.push_back({ds[i].id, o[i], d[i], kept ? it->second : -1, kept});
  }
  return ref;
}

TrajectoryDataset retained_subset(const TrajectoryDataset& ds, const ReferenceClusters& ref) {
  if (ds.size() != ref.entries.size()) {
    throw DataError("reference covers " + std::to_string(ref.entries.size()) +
                    " trajectories, dataset holds " + std::to_string(ds.size()));
  }
  TrajectoryDataset out;
  out.site_id = ds.site_id;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].id != ref.entries[i].trajectory_id) {
      throw DataError("reference entry " + std::to_string(i) + " is '" +
                      ref.entries[i].trajectory_id + "', dataset has '" + ds[i].id + "'");
    }
    if (ref.entries[i].retained) out.trajectories.push_back(ds[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_reference_csv(const std::filesystem::path& path, const ReferenceClusters& ref) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "track_id,origin_cluster,destination_cluster,od_label,retained\n";
  for (const auto& e : ref.entries) {
    out << e.trajectory_id << ',' << e.origin_cluster << ',' << e.destination_cluster << ','
        << e.od_label << ',' << (e.retained ? 1 : 0) << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

ReferenceClusters read_reference_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) ||
      detail::trim(line) != "track_id,origin_cluster,destination_cluster,od_label,retained") {
    throw DataError("'" + path.string() + "': unexpected reference header");
  }
  ReferenceClusters ref;
  std::set<int> labels;
  int max_o = -1, max_d = -1;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    const auto bad = [&](const std::string& what) {
      return DataError("'" + path.string() + "' row " + std::to_string(row) + ": " + what);
    };
    if (f.size() != 5) throw bad("expected 5 fields");
    const auto oc = detail::parse_int(f[1]);
    const auto dc = detail::parse_int(f[2]);
    const auto od = detail::parse_int(f[3]);
    const auto kept = detail::parse_int(f[4]);
    if (!oc || !dc || !od || !kept || *oc < 0 || *dc < 0 || (*kept != 0 && *kept != 1)) {
      throw bad("malformed values");
    }
    if ((*kept == 1) != (*od >= 0)) throw bad("od_label and retained disagree");
    ReferenceClusters::Entry e{std::string(f[0]), static_cast<int>(*oc), static_cast<int>(*dc),
                               static_cast<int>(*od), *kept == 1};
    max_o = std::max(max_o, e.origin_cluster);
    max_d = std::max(max_d, e.destination_cluster);
    if (e.retained) labels.insert(e.od_label);
    ref.entries.push_back(std::move(e));
  }
  ref.k_origin = static_cast<std::size_t>(max_o + 1);
  ref.k_destination = static_cast<std::size_t>(max_d + 1);
  ref.cluster_count = labels.size();
  return ref;
}

void write_elbow_csv(const std::filesystem::path& path, const ElbowCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "k,mean_distance,std\n";
  for (std::size_t j = 0; j < curve.mean.size(); ++j) {
    out << (curve.k_min + j) << ',' << detail::exact_number(curve.mean[j]) << ','
        << detail::exact_number(curve.stddev[j]) << '\n';
  }
}

}  // namespace trajclust
