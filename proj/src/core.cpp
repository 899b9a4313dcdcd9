#include "trajclust/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "text_util.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

double euclidean(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

const Point& origin(const Trajectory& traj) { return traj.points.front(); }
const Point& destination(const Trajectory& traj) { return traj.points.back(); }

std::string_view to_string(ViolationRule rule) {
  switch (rule) {
    case ViolationRule::DuplicateId: return "duplicate id";
    case ViolationRule::TooShort: return "too short";
    case ViolationRule::TimestampOrder: return "timestamp order";
    case ViolationRule::NonFinite: return "non-finite value";
  }
  return "unknown";
}

std::vector<Violation> validate_trajectory(const Trajectory& traj) {
  std::vector<Violation> out;
  if (traj.size() < kMinTrajectoryLength) {
    out.push_back({traj.id, ViolationRule::TooShort,
                   std::to_string(traj.size()) + " point(s), need at least " +
                       std::to_string(kMinTrajectoryLength)});
  }
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const auto& p = traj.points[j];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t)) {
      out.push_back({traj.id, ViolationRule::NonFinite, "point " + std::to_string(j)});
      break;
    }
  }
  for (std::size_t j = 1; j < traj.size(); ++j) {
    if (!(traj.points[j].t > traj.points[j - 1].t)) {
      out.push_back({traj.id, ViolationRule::TimestampOrder,
                     "t[" + std::to_string(j) + "] does not exceed t[" + std::to_string(j - 1) +
                         "]"});
      break;
    }
  }
  return out;
}

std::vector<Violation> validate_dataset(const TrajectoryDataset& ds) {
  std::vector<Violation> out;
  std::unordered_set<std::string> seen;
  std::set<std::string> reported;
  for (const auto& traj : ds.trajectories) {
    if (!seen.insert(traj.id).second && reported.insert(traj.id).second) {
      out.push_back({traj.id, ViolationRule::DuplicateId, "id appears more than once"});
    }
    auto own = validate_trajectory(traj);
    out.insert(out.end(), own.begin(), own.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::DTW: return "DTW";
    case DistanceKind::LCSS: return "LCSS";
    case DistanceKind::EDR: return "EDR";
    case DistanceKind::PF: return "PF";
    case DistanceKind::Hausdorff: return "Hausdorff";
    case DistanceKind::SSPD: return "SSPD";
  }
  return "unknown";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

DistanceKind parse_distance_kind(std::string_view name) {
  const auto n = lower(name);
  for (auto k : {DistanceKind::DTW, DistanceKind::LCSS, DistanceKind::EDR, DistanceKind::PF,
                 DistanceKind::Hausdorff, DistanceKind::SSPD}) {
    if (lower(to_string(k)) == n) return k;
  }
  throw ConfigError("unknown distance '" + std::string(name) + "'");
}

void DistanceSpec::validate() const {
  const bool wants_radius = kind == DistanceKind::LCSS || kind == DistanceKind::EDR;
  const bool wants_window = kind == DistanceKind::PF;
  const auto name = std::string(to_string(kind));
  if (wants_radius != radius.has_value()) {
    throw ConfigError(name + (wants_radius ? " requires r_b" : " takes no r_b"));
  }
  if (wants_window != window.has_value()) {
    throw ConfigError(name + (wants_window ? " requires w" : " takes no w"));
  }
  if (radius && !(*radius > 0.0 && std::isfinite(*radius))) {
    throw ConfigError(name + ": r_b must be a positive finite number");
  }
  if (window && !(*window > 0.0 && *window <= 1.0)) {
    throw ConfigError(name + ": w must lie in (0, 1]");
  }
  if (normalize_edr && kind != DistanceKind::EDR) {
    throw ConfigError(name + ": normalization applies to EDR only");
  }
}

std::string DistanceSpec::id() const {
  std::string out(to_string(kind));
  if (radius) out += "[r_b=" + detail::compact_number(*radius) + "]";
  if (window) out += "[w=" + detail::compact_number(*window) + "]";
  if (normalize_edr) out += "[normalized]";
  return out;
}

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::KMedoids: return "KMedoids";
    case AlgorithmKind::Agglomerative: return "Agglomerative";
    case AlgorithmKind::Spectral: return "Spectral";
    case AlgorithmKind::DBSCAN: return "DBSCAN";
    case AlgorithmKind::OPTICS: return "OPTICS";
  }
  return "unknown";
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Single: return "single";
  }
  return "unknown";
}

AlgorithmKind parse_algorithm_kind(std::string_view name) {
  const auto n = lower(name);
  for (auto k : {AlgorithmKind::KMedoids, AlgorithmKind::Agglomerative, AlgorithmKind::Spectral,
                 AlgorithmKind::DBSCAN, AlgorithmKind::OPTICS}) {
    if (lower(to_string(k)) == n) return k;
  }
  if (n == "k-medoids" || n == "kmedoid") return AlgorithmKind::KMedoids;
  if (n == "hierarchical") return AlgorithmKind::Agglomerative;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

Linkage parse_linkage(std::string_view name) {
  const auto n = lower(name);
  for (auto l : {Linkage::Complete, Linkage::Average, Linkage::Single}) {
    if (to_string(l) == n) return l;
  }
  throw ConfigError("unknown linkage '" + std::string(name) + "'");
}

bool requires_cluster_count(AlgorithmKind kind) {
  return kind == AlgorithmKind::KMedoids || kind == AlgorithmKind::Agglomerative ||
         kind == AlgorithmKind::Spectral;
}

void AlgorithmSpec::validate() const {
  const auto name = std::string(to_string(kind));
  const bool wants_linkage = kind == AlgorithmKind::Agglomerative;
  const bool wants_min_points = kind == AlgorithmKind::DBSCAN || kind == AlgorithmKind::OPTICS;
  const bool wants_radius = kind == AlgorithmKind::DBSCAN;
  const bool wants_seed = kind == AlgorithmKind::KMedoids || kind == AlgorithmKind::Spectral;
  if (wants_linkage != linkage.has_value()) {
    throw ConfigError(name + (wants_linkage ? " requires a linkage" : " takes no linkage"));
  }
  if (wants_min_points != min_points.has_value()) {
    throw ConfigError(name + (wants_min_points ? " requires n_z_min" : " takes no n_z_min"));
  }
  if (wants_radius != radius.has_value()) {
    throw ConfigError(name + (wants_radius ? " requires d_z" : " takes no d_z"));
  }
  if (wants_seed != seed.has_value()) {
    throw ConfigError(name + (wants_seed ? " requires a seed" : " takes no seed"));
  }
  if (min_points && *min_points < 1) throw ConfigError(name + ": n_z_min must be >= 1");
  if (radius && !(*radius >= 0.0 && std::isfinite(*radius))) {
    throw ConfigError(name + ": d_z must be a nonnegative finite number");
  }
}

std::string AlgorithmSpec::id() const {
  std::string out(to_string(kind));
  if (linkage) out += "[linkage=" + std::string(to_string(*linkage)) + "]";
  if (min_points) out += "[n_z_min=" + std::to_string(*min_points) + "]";
  if (radius) out += "[d_z=" + detail::compact_number(*radius) + "]";
  if (seed && *seed != 0) out += "[seed=" + std::to_string(*seed) + "]";
  return out;
}

void ClusteringSetup::validate() const {
  distance.validate();
  algorithm.validate();
  const bool wants_k = requires_cluster_count(algorithm.kind);
  if (wants_k && !cluster_count) {
    throw ConfigError(std::string(to_string(algorithm.kind)) + ": k required");
  }
  if (!wants_k && cluster_count) {
    throw ConfigError(std::string(to_string(algorithm.kind)) + ": k not an input");
  }
  if (cluster_count && (*cluster_count < kMinClusterCount || *cluster_count > kMaxClusterCount)) {
    throw ConfigError("k=" + std::to_string(*cluster_count) + " outside [" +
                      std::to_string(kMinClusterCount) + ", " + std::to_string(kMaxClusterCount) +
                      "]");
  }
}

std::string ClusteringSetup::id() const {
  auto out = distance.id() + "/" + algorithm.id();
  if (cluster_count) out += "/k=" + std::to_string(*cluster_count);
  return out;
}

std::size_t ClusterAssignment::cluster_count() const {
  std::set<int> distinct;
  for (int l : labels) {
    if (l != kNoise) distinct.insert(l);
  }
  return distinct.size();
}

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

}  // namespace trajclust
