#include <fstream>
#include <unordered_map>

#include "trajclust/cluster.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

ClusterAssignment canonical_labels(const ClusterAssignment& a) {
  ClusterAssignment out;
  out.labels.reserve(a.size());
  std::unordered_map<int, int> remap;
  for (int l : a.labels) {
    if (l == ClusterAssignment::kNoise) {
      out.labels.push_back(l);
      continue;
    }
    const auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.labels.push_back(it->second);
  }
  return out;
}

ClusterAssignment run_algorithm(const PairwiseMatrix& m, const AlgorithmSpec& spec,
                                std::optional<std::size_t> k) {
  spec.validate();
  const auto name = std::string(to_string(spec.kind));
  if (requires_cluster_count(spec.kind) && !k) throw ConfigError(name + ": k required");
  if (!requires_cluster_count(spec.kind) && k) throw ConfigError(name + ": k not an input");
  switch (spec.kind) {
    case AlgorithmKind::KMedoids: return kmedoids(m, *k, *spec.seed);
    case AlgorithmKind::Agglomerative: return agglomerative(m, *k, *spec.linkage);
    case AlgorithmKind::Spectral: return spectral(m, *k, *spec.seed);
    case AlgorithmKind::DBSCAN: return dbscan(m, *spec.radius, *spec.min_points);
    case AlgorithmKind::OPTICS: return optics(m, *spec.min_points);
  }
  throw ConfigError("unsupported algorithm");
}

ClusterAssignment run_setup(const TrajectoryDataset& ds, const DistanceMatrix& matrix,
                            const ClusteringSetup& setup) {
  if (matrix.size() != ds.size() || matrix.fingerprint() != dataset_fingerprint(ds)) {
    throw CacheMismatchError("distance matrix does not belong to dataset '" + ds.site_id + "'");
  }
  if (matrix.spec() != setup.distance) {
    throw ConfigError("setup asks for " + setup.distance.id() + " but the matrix holds " +
                      matrix.spec().id());
  }
  setup.validate();
  return run_algorithm(matrix, setup.algorithm, setup.cluster_count);
}

void write_assignment_csv(const std::filesystem::path& path, const TrajectoryDataset& ds,
                          const ClusterAssignment& labels) {
  if (labels.size() != ds.size()) throw DataError("assignment does not match the dataset size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "track_id,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) out << ds[i].id << ',' << labels.labels[i] << '\n';
}

}  // namespace trajclust
