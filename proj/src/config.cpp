#include "trajclust/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

using nlohmann::json;

namespace {

void allow_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
  const std::set<std::string_view> allowed(keys);
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("config: unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get(const json& j, std::string_view key, std::string_view where) {
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + std::string(key) + "' in " + std::string(where) +
                      " has the wrong type");
  }
}

template <typename T>
void read(const json& j, std::string_view key, std::string_view where, T& out) {
  if (j.contains(std::string(key))) out = get<T>(j, key, where);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

ColumnRef column_ref(const json& j, std::string_view key) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  throw ConfigError("config: column '" + std::string(key) + "' must be a name or an index");
}

DistanceSpec distance_from(const json& j) {
  if (j.is_string()) {
    DistanceSpec s{parse_distance_kind(j.get<std::string>()), {}, {}, false};
    s.validate();
    return s;
  }
  if (!j.is_object()) throw ConfigError("config: distance entries are strings or objects");
  allow_keys(j, "distance", {"kind", "r_b", "w", "normalized"});
  DistanceSpec s{parse_distance_kind(get<std::string>(j, "kind", "distance")), {}, {}, false};
  if (j.contains("r_b")) s.radius = get<double>(j, "r_b", "distance");
  if (j.contains("w")) s.window = get<double>(j, "w", "distance");
  read(j, "normalized", "distance", s.normalize_edr);
  s.validate();
  return s;
}

AlgorithmSpec algorithm_from(const json& j) {
  AlgorithmSpec s;
  if (j.is_string()) {
    s.kind = parse_algorithm_kind(j.get<std::string>());
  } else if (j.is_object()) {
    allow_keys(j, "algorithm", {"kind", "linkage", "seed", "d_z", "n_z_min"});
    s.kind = parse_algorithm_kind(get<std::string>(j, "kind", "algorithm"));
    if (j.contains("linkage")) s.linkage = parse_linkage(get<std::string>(j, "linkage", "algorithm"));
    if (j.contains("seed")) s.seed = get<std::uint64_t>(j, "seed", "algorithm");
    if (j.contains("d_z")) s.radius = get<double>(j, "d_z", "algorithm");
    if (j.contains("n_z_min")) s.min_points = get<std::size_t>(j, "n_z_min", "algorithm");
  } else {
    throw ConfigError("config: algorithm entries are strings or objects");
  }
  if ((s.kind == AlgorithmKind::KMedoids || s.kind == AlgorithmKind::Spectral) && !s.seed) s.seed = 0;
  s.validate();
  return s;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

}  // namespace

DistanceSpec parse_distance_spec(std::string_view text) { return distance_from(parse_json(text)); }
AlgorithmSpec parse_algorithm_spec(std::string_view text) { return algorithm_from(parse_json(text)); }

void RunConfig::validate() const {
  columns.validate();
  grid.validate();
  if (permutations < 2) throw ConfigError("config: permutations must be >= 2");
  if (!(reference.epsilon >= 0.0 && reference.epsilon < 1.0)) {
    throw ConfigError("config: epsilon must lie in [0, 1)");
  }
  if (reference.k_min < kMinClusterCount || reference.k_max <= reference.k_min + 2) {
    throw ConfigError("config: reference k range must start at >= 2 and span >= 3 values");
  }
  if (!requires_cluster_count(reference.algorithm.kind)) {
    throw ConfigError("config: the endpoint algorithm must take k");
  }
  for (const auto& k : {reference.k_origin, reference.k_destination}) {
    if (k && *k < kMinClusterCount) throw ConfigError("config: k overrides must be >= 2");
  }
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base) {
  const auto j = parse_json(text);
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  allow_keys(j, "config", {"dataset", "boundary", "grid", "reference", "permutations", "seed",
                           "workers", "output", "cache"});
  RunConfig c;

  if (!j.contains("dataset")) throw ConfigError("config: 'dataset' is required");
  const auto& d = j["dataset"];
  if (d.is_string()) {
    c.dataset = resolve(base, d.get<std::string>());
  } else if (d.is_object()) {
    allow_keys(d, "dataset", {"path", "columns", "position_scale", "time_scale", "delimiter", "header"});
    c.dataset = resolve(base, get<std::string>(d, "path", "dataset"));
    if (d.contains("columns")) {
      const auto& cols = d["columns"];
      if (!cols.is_object()) throw ConfigError("config: dataset.columns must be an object");
      allow_keys(cols, "dataset.columns", {"id", "t", "x", "y"});
      if (cols.contains("id")) c.columns.id_column = column_ref(cols["id"], "id");
      if (cols.contains("t")) c.columns.t_column = column_ref(cols["t"], "t");
      if (cols.contains("x")) c.columns.x_column = column_ref(cols["x"], "x");
      if (cols.contains("y")) c.columns.y_column = column_ref(cols["y"], "y");
    }
    read(d, "position_scale", "dataset", c.columns.position_scale);
    read(d, "time_scale", "dataset", c.columns.time_scale);
    read(d, "header", "dataset", c.columns.has_header);
    if (d.contains("delimiter")) {
      const auto delim = get<std::string>(d, "delimiter", "dataset");
      if (delim.size() != 1) throw ConfigError("config: delimiter must be one character");
      c.columns.delimiter = delim[0];
    }
  } else {
    throw ConfigError("config: 'dataset' must be a path or an object");
  }

  if (j.contains("boundary")) {
    const auto& b = j["boundary"];
    try {
      c.boundary = b.is_string() ? load_boundary(resolve(base, b.get<std::string>()))
                                 : parse_boundary_json(b.dump());
    } catch (const DataError& e) {
      throw ConfigError(std::string("config: boundary: ") + e.what());
    }
  }

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_object()) throw ConfigError("config: 'grid' must be an object");
    allow_keys(g, "grid", {"distances", "algorithms", "k_min", "k_max"});
    if (g.contains("distances") && g["distances"] != "default") {
      if (!g["distances"].is_array()) throw ConfigError("config: grid.distances must be a list");
      c.grid.distances.clear();
      for (const auto& e : g["distances"]) c.grid.distances.push_back(distance_from(e));
    }
    if (g.contains("algorithms") && g["algorithms"] != "default") {
      if (!g["algorithms"].is_array()) throw ConfigError("config: grid.algorithms must be a list");
      c.grid.algorithms.clear();
      for (const auto& e : g["algorithms"]) c.grid.algorithms.push_back(algorithm_from(e));
    }
    read(g, "k_min", "grid", c.grid.k_min);
    read(g, "k_max", "grid", c.grid.k_max);
  }

  if (j.contains("reference")) {
    const auto& r = j["reference"];
    if (!r.is_object()) throw ConfigError("config: 'reference' must be an object");
    allow_keys(r, "reference", {"k_min", "k_max", "epsilon", "algorithm", "replications",
                                "k_origin", "k_destination"});
    read(r, "k_min", "reference", c.reference.k_min);
    read(r, "k_max", "reference", c.reference.k_max);
    read(r, "epsilon", "reference", c.reference.epsilon);
    read(r, "replications", "reference", c.reference.replications);
    if (r.contains("algorithm")) c.reference.algorithm = algorithm_from(r["algorithm"]);
    if (r.contains("k_origin")) c.reference.k_origin = get<std::size_t>(r, "k_origin", "reference");
    if (r.contains("k_destination")) {
      c.reference.k_destination = get<std::size_t>(r, "k_destination", "reference");
    }
  }

  read(j, "permutations", "config", c.permutations);
  read(j, "seed", "config", c.seed);
  read(j, "workers", "config", c.workers);
  if (j.contains("output")) c.output = get<std::string>(j, "output", "config");
  if (j.contains("cache")) c.cache = get<std::string>(j, "cache", "config");
  c.output = resolve(base, c.output.string());
  c.cache = resolve(base, c.cache.string());
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace trajclust
