#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "trajclust/bench.hpp"
#include "trajclust/ingest.hpp"
#include "trajclust/reference.hpp"

namespace trajclust {

struct ReferenceConfig {
  std::size_t k_min = kDefaultElbowMinK;
  std::size_t k_max = kDefaultElbowMaxK;  // exclusive
  double epsilon = kDefaultOdThreshold;
  AlgorithmSpec algorithm = default_endpoint_algorithm();
  std::size_t replications = 1;
  std::optional<std::size_t> k_origin;
  std::optional<std::size_t> k_destination;
};

struct RunConfig {
  std::filesystem::path dataset;
  ColumnMapping columns;
  std::optional<SiteBoundary> boundary;
  SetupGrid grid = SetupGrid::defaults();
  ReferenceConfig reference;
  std::size_t permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::filesystem::path output = "out";
  std::filesystem::path cache = "cache";

  void validate() const;
};

/// Parses a JSON run configuration. Relative paths are resolved against
/// `base_dir`. Unknown keys are rejected. Throws ConfigError.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Parses a distance entry: "DTW", "SSPD", or {"kind": "LCSS", "r_b": 2}.
DistanceSpec parse_distance_spec(std::string_view json_text);
/// Parses an algorithm entry: "k-medoids", or {"kind": "agglomerative", "linkage": "average"}.
AlgorithmSpec parse_algorithm_spec(std::string_view json_text);

}  // namespace trajclust
