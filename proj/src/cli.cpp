#include "trajclust/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "CLI11.hpp"
#include "text_util.hpp"
#include "trajclust/bench.hpp"
#include "trajclust/cluster.hpp"
#include "trajclust/config.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/error.hpp"
#include "trajclust/ingest.hpp"
#include "trajclust/random.hpp"
#include "trajclust/reference.hpp"

namespace trajclust {

namespace {

struct Overrides {
  std::string config;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k_origin;
  std::optional<std::size_t> k_destination;
  std::optional<double> epsilon;
  std::optional<std::size_t> permutations;
  std::optional<std::string> out;
  std::optional<std::string> cache;
};

RunConfig resolve_config(const Overrides& o) {
  auto c = load_config(o.config);
  if (o.workers) c.workers = *o.workers;
  if (o.seed) c.seed = *o.seed;
  if (o.k_origin) c.reference.k_origin = *o.k_origin;
  if (o.k_destination) c.reference.k_destination = *o.k_destination;
  if (o.epsilon) c.reference.epsilon = *o.epsilon;
  if (o.permutations) c.permutations = *o.permutations;
  if (o.out) c.output = *o.out;
  if (o.cache) c.cache = *o.cache;
  c.validate();
  return c;
}

TrajectoryDataset load_dataset(const RunConfig& c, std::ostream& err) {
  std::vector<Violation> dropped;
  auto ds = load_csv(c.dataset, c.columns, &dropped);
  for (const auto& v : dropped) {
    err << "dropped trajectory '" << v.trajectory_id << "': " << to_string(v.rule) << " ("
        << v.detail << ")\n";
  }
  if (c.boundary) {
    ds = clip_to_boundary(ds, *c.boundary);
    if (ds.empty()) throw DataError("empty dataset after clipping");
  }
  if (ds.empty()) throw DataError("empty dataset");
  return ds;
}

int cmd_ingest(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(c, err);
  std::filesystem::create_directories(c.output);
  const auto path = c.output / "dataset.csv";
  write_canonical_csv(path, ds);
  std::size_t lo = ds[0].size(), hi = 0, total = 0;
  for (const auto& t : ds.trajectories) {
    lo = std::min(lo, t.size());
    hi = std::max(hi, t.size());
    total += t.size();
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "trajectories: %zu\npoints: %zu\nlength min/mean/max: %zu/%.2f/%zu\n",
                ds.size(), total, lo, static_cast<double>(total) / static_cast<double>(ds.size()), hi);
  out << "site: " << ds.site_id << '\n' << buf << "wrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_distmat(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(c, err);
  const auto fp = dataset_fingerprint(ds);
  std::filesystem::create_directories(c.cache);
  for (const auto& spec : c.grid.distances) {
    const auto path = c.cache / cache_file_name(spec);
    if (std::filesystem::exists(path)) {
      try {
        load_matrix(path, spec, fp);
        out << "cache hit: " << spec.id() << '\n';
        continue;
      } catch (const CacheMismatchError& e) {
        err << "stale cache for " << spec.id() << " (" << e.what() << "), recomputing\n";
      }
    }
    save_matrix(path, build_matrix(ds, spec, c.workers));
    out << "built: " << spec.id() << " -> " << path.string() << '\n';
  }
  return kExitOk;
}

std::size_t choose_k(const std::vector<Point>& points, const RunConfig& c,
                     std::optional<std::size_t> override_k, const std::filesystem::path& csv,
                     const char* name, std::ostream& out) {
  if (override_k && *override_k > points.size()) {
    throw ConfigError(std::string(name) + " override k=" + std::to_string(*override_k) +
                      " exceeds the " + std::to_string(points.size()) + " points");
  }
  const auto k_max = std::min(c.reference.k_max, points.size() + 1);
  if (k_max < c.reference.k_min + 3) {
    if (override_k) return *override_k;
    throw ConfigError(std::string(name) + ": too few points for an elbow curve");
  }
  const auto curve = endpoint_elbow(points, c.reference.k_min, k_max, c.reference.algorithm,
                                    c.reference.replications, derive_seed(c.seed, {1}));
  write_elbow_csv(csv, curve);
  const auto k = pick_elbow(curve, override_k);
  out << name << " k: " << k << (override_k ? " (override)" : " (elbow)") << '\n';
  return k;
}

ReferenceClusters make_reference(const TrajectoryDataset& ds, const RunConfig& c, std::ostream& out) {
  std::filesystem::create_directories(c.output);
  std::vector<Point> origins, destinations;
  for (const auto& t : ds.trajectories) {
    origins.push_back(origin(t));
    destinations.push_back(destination(t));
  }
  const auto k_o = choose_k(origins, c, c.reference.k_origin, c.output / "elbow_origin.csv",
                            "origin", out);
  const auto k_d = choose_k(destinations, c, c.reference.k_destination,
                            c.output / "elbow_destination.csv", "destination", out);
  auto ref = build_reference(ds, k_o, k_d, c.reference.algorithm, c.reference.epsilon);
  write_reference_csv(c.output / "reference.csv", ref);
  out << "reference clusters: " << ref.cluster_count << " (" << ref.retained_count() << " of "
      << ds.size() << " trajectories retained, epsilon=" << detail::compact_number(ref.epsilon)
      << ")\n";
  return ref;
}

int cmd_refclusters(const RunConfig& c, std::ostream& out, std::ostream& err) {
  make_reference(load_dataset(c, err), c, out);
  return kExitOk;
}

int cmd_benchmark(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(c, err);
  const auto ref_path = c.output / "reference.csv";
  ReferenceClusters ref;
  if (std::filesystem::exists(ref_path)) {
    ref = read_reference_csv(ref_path);
    out << "using " << ref_path.string() << '\n';
  } else {
    ref = make_reference(ds, c, out);
  }
  BenchmarkOptions opts;
  opts.permutations = c.permutations;
  opts.seed = c.seed;
  opts.workers = c.workers;
  opts.cache_dir = c.cache;
  opts.log = [&](const std::string& msg) { err << msg << '\n'; };
  auto result = run_benchmark(ds, ref, c.grid, opts);
  for (const auto& f : result.failures) {
    err << "setup failed: " << f.setup_id << " permutation " << f.permutation << ": " << f.message
        << '\n';
  }
  if (result.all_failed()) {
    err << "every setup failed\n";
    return kExitSystemic;
  }
  const auto report = analyze(std::move(result));
  if (report.frequencies.warning) err << "warning: " << *report.frequencies.warning << '\n';
  const auto files = write_reports(c.output, report);
  out << "retained measures:";
  for (auto m : report.retained) out << ' ' << to_string(m);
  out << "\ntop setups:\n";
  for (std::size_t pos = 0; pos < report.ranks.top.size(); ++pos) {
    const auto s = report.ranks.top[pos];
    out << "  " << pos + 1 << ". " << report.ranks.setups[s].id() << "  average rank "
        << detail::compact_number(report.ranks.average_rank[s]) << '\n';
  }
  for (const auto& f : files) out << "wrote " << f.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trajectory clustering benchmark"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration")->required();
  app.add_option("--workers", o.workers, "worker threads (0 = all cores)");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--k-origin", o.k_origin, "number of origin clusters (skips the elbow pick)");
  app.add_option("--k-destination", o.k_destination,
                 "number of destination clusters (skips the elbow pick)");
  app.add_option("--epsilon", o.epsilon, "minimum OD pair share");
  app.add_option("--permutations", o.permutations, "dataset permutations per setup");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--cache", o.cache, "distance matrix cache directory");

  using Command = int (*)(const RunConfig&, std::ostream&, std::ostream&);
  Command command = nullptr;
  app.add_subcommand("ingest", "load, validate and clip the dataset")
      ->callback([&] { command = cmd_ingest; });
  app.add_subcommand("distmat", "build or refresh the distance matrix cache")
      ->callback([&] { command = cmd_distmat; });
  app.add_subcommand("refclusters", "origin/destination reference clusters")
      ->callback([&] { command = cmd_refclusters; });
  app.add_subcommand("benchmark", "run and rank every clustering setup")
      ->callback([&] { command = cmd_benchmark; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    return command(resolve_config(o), out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitSystemic;
  }
}

}  // namespace trajclust
