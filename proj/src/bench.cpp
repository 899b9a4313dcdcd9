#include "trajclust/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "trajclust/cluster.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/error.hpp"
#include "trajclust/random.hpp"

namespace trajclust {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<DistanceSpec> SetupGrid::default_distances() {
  std::vector<DistanceSpec> out{DistanceSpec::dtw()};
  for (double r : {1.0, 2.0, 3.0, 5.0, 7.0, 10.0}) out.push_back(DistanceSpec::lcss(r));
  for (double r : {1.0, 2.0, 3.0, 5.0, 7.0, 10.0}) out.push_back(DistanceSpec::edr(r));
  for (double w : {0.01, 0.05, 0.1, 0.2, 0.3, 0.5}) out.push_back(DistanceSpec::pf(w));
  out.push_back(DistanceSpec::hausdorff());
  out.push_back(DistanceSpec::sspd());
  return out;
}

std::vector<AlgorithmSpec> SetupGrid::default_algorithms() {
  return {AlgorithmSpec::kmedoids(), AlgorithmSpec::agglomerative(Linkage::Complete),
          AlgorithmSpec::agglomerative(Linkage::Average),
          AlgorithmSpec::agglomerative(Linkage::Single), AlgorithmSpec::spectral()};
}

SetupGrid SetupGrid::defaults() {
  return {default_distances(), default_algorithms(), kMinClusterCount, kMaxClusterCount};
}

void SetupGrid::validate() const {
  if (distances.empty()) throw ConfigError("grid: no distances");
  if (algorithms.empty()) throw ConfigError("grid: no algorithms");
  if (k_min > k_max) throw ConfigError("grid: k_min > k_max");
  for (const auto& d : distances) d.validate();
  for (const auto& a : algorithms) a.validate();
  for (const auto& s : setups()) s.validate();
}

std::vector<ClusteringSetup> SetupGrid::setups() const {
  std::vector<ClusteringSetup> out;
  for (const auto& d : distances) {
    for (const auto& a : algorithms) {
      if (!requires_cluster_count(a.kind)) {
        out.push_back({d, a, std::nullopt});
        continue;
      }
      for (auto k = k_min; k <= k_max; ++k) out.push_back({d, a, k});
    }
  }
  return out;
}

bool BenchmarkResult::all_failed() const {
  if (setups.empty()) return true;
  std::vector<std::size_t> per_setup(setups.size(), 0);
  std::map<std::string, std::size_t> index;
  for (std::size_t s = 0; s < setups.size(); ++s) index[setups[s].id()] = s;
  for (const auto& f : failures) ++per_setup[index.at(f.setup_id)];
  return std::all_of(per_setup.begin(), per_setup.end(),
                     [&](std::size_t c) { return c >= permutations; });
}

// ---------------------------------------------------------------------------

double t_multiplier(std::size_t n) {
  if (n < 2) throw ConfigError("t quantile needs n >= 2");
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(boost::math::complement(dist, 0.025));
}

namespace {

std::pair<double, double> mean_and_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0};
}

}  // namespace

double lower_bound(std::span<const double> values) {
  if (values.size() < 2) throw ConfigError("lower bound needs at least 2 values");
  const auto [mean, sd] = mean_and_sd(values);
  return mean - t_multiplier(values.size()) * sd / std::sqrt(static_cast<double>(values.size()));
}

void summarize(PerformanceRecord& r) {
  if (r.values.empty() ||
      std::any_of(r.values.begin(), r.values.end(), [](double v) { return std::isnan(v); })) {
    r.mean = r.stddev = r.lower = kNaN;
    return;
  }
  std::tie(r.mean, r.stddev) = mean_and_sd(r.values);
  r.lower = r.values.size() >= 2 ? lower_bound(r.values) : r.mean;
}

// ---------------------------------------------------------------------------

namespace {

unsigned resolve_workers(unsigned w) {
  if (w != 0) return w;
  return std::max(1u, std::thread::hardware_concurrency());
}

DistanceMatrix obtain_matrix(const TrajectoryDataset& ds, const DistanceSpec& spec,
                             const BenchmarkOptions& options) {
  if (!options.cache_dir) return build_matrix(ds, spec, resolve_workers(options.workers));
  const auto path = *options.cache_dir / cache_file_name(spec);
  if (std::filesystem::exists(path)) {
    if (options.log) options.log("cache hit: " + path.string());
    return load_matrix(path, spec, dataset_fingerprint(ds));
  }
  auto m = build_matrix(ds, spec, resolve_workers(options.workers));
  std::filesystem::create_directories(*options.cache_dir);
  save_matrix(path, m);
  return m;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Job {
  std::size_t permutation;
  std::size_t algorithm;
};

}  // namespace

BenchmarkResult run_benchmark(const TrajectoryDataset& ds, const ReferenceClusters& ref,
                              const SetupGrid& grid, const BenchmarkOptions& options) {
  grid.validate();
  const auto n_perm = options.permutations;
  if (n_perm < 2) throw ConfigError("benchmark: needs at least 2 permutations");
  const auto subset = retained_subset(ds, ref);
  const auto n = subset.size();
  if (n < 2) throw DataError("benchmark: fewer than 2 retained trajectories");
  const auto indices = ref.retained_indices();
  const auto ref_labels = ref.retained_labels();
  const auto workers = resolve_workers(options.workers);

  BenchmarkResult result;
  result.permutations = n_perm;
  result.setups = grid.setups();
  const auto n_setups = result.setups.size();
  result.records.reserve(n_setups * kMeasureCount);
  for (const auto& s : result.setups) {
    for (auto m : kAllMeasures) {
      PerformanceRecord r{s, m, std::vector<double>(n_perm, kNaN)};
      result.records.push_back(std::move(r));
    }
  }
  std::vector<double> noise(n_setups * n_perm, kNaN);

  // setups() order: distance, then algorithm, then k.
  std::vector<std::vector<std::size_t>> setups_of(grid.distances.size() * grid.algorithms.size());
  {
    std::size_t s = 0;
    for (std::size_t d = 0; d < grid.distances.size(); ++d) {
      for (std::size_t a = 0; a < grid.algorithms.size(); ++a) {
        const std::size_t count = requires_cluster_count(grid.algorithms[a].kind)
                                      ? grid.k_max - grid.k_min + 1
                                      : 1;
        for (std::size_t c = 0; c < count; ++c) setups_of[d * grid.algorithms.size() + a].push_back(s++);
      }
    }
  }

  std::vector<std::vector<std::size_t>> perms;
  for (std::size_t l = 0; l < n_perm; ++l) {
    perms.push_back(random_permutation(n, derive_seed(options.seed, {l})));
  }

  std::vector<Job> jobs;
  for (std::size_t l = 0; l < n_perm; ++l) {
    for (std::size_t a = 0; a < grid.algorithms.size(); ++a) jobs.push_back({l, a});
  }

  for (std::size_t d = 0; d < grid.distances.size(); ++d) {
    const auto& spec = grid.distances[d];
    if (options.log) options.log("distance " + spec.id());
    const auto matrix = obtain_matrix(ds, spec, options).restricted(indices, subset);

    std::vector<std::vector<SetupFailure>> job_failures(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t j) {
      const auto [l, a] = jobs[j];
      const auto& perm = perms[l];
      const auto permuted = matrix.reordered(perm);
      auto algo = grid.algorithms[a];
      if (algo.seed) algo.seed = derive_seed(options.seed, {l, *algo.seed});
      const auto& targets = setups_of[d * grid.algorithms.size() + a];

      const auto record = [&](std::size_t s, const ClusterAssignment& permuted_labels) {
        ClusterAssignment labels;
        labels.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) labels.labels[perm[i]] = permuted_labels.labels[i];
        const auto e = evaluate_labels(matrix, labels, ref_labels);
        for (auto m : kAllMeasures) {
          result.records[s * kMeasureCount + index_of(m)].values[l] = e[m];
        }
        noise[s * n_perm + l] = e.noise_fraction;
      };
      const auto fail = [&](std::size_t s, const std::string& msg) {
        job_failures[j].push_back({result.setups[s].id(), l, msg});
      };

      // Structures shared by every k of one algorithm.
      std::optional<std::vector<Merge>> tree;
      std::optional<SpectralEmbedding> embedding;
      try {
        if (algo.kind == AlgorithmKind::Agglomerative) tree = linkage_tree(permuted, *algo.linkage);
        if (algo.kind == AlgorithmKind::Spectral) embedding.emplace(permuted);
      } catch (const std::exception& e) {
        for (auto s : targets) fail(s, e.what());
        return;
      }
      for (auto s : targets) {
        try {
          const auto& k = result.setups[s].cluster_count;
          if (k && *k > n) {
            throw ConfigError("k=" + std::to_string(*k) + " exceeds " + std::to_string(n) +
                              " trajectories");
          }
          if (tree) {
            record(s, cut_tree(*tree, n, *k));
          } else if (embedding) {
            record(s, embedding->cluster(*k, *algo.seed));
          } else {
            record(s, run_algorithm(permuted, algo, k));
          }
        } catch (const std::exception& e) {
          fail(s, e.what());
        }
      }
    });
    for (auto& f : job_failures) {
      result.failures.insert(result.failures.end(), f.begin(), f.end());
    }
  }

  std::sort(result.failures.begin(), result.failures.end(),
            [](const SetupFailure& a, const SetupFailure& b) {
              return std::tie(a.setup_id, a.permutation) < std::tie(b.setup_id, b.permutation);
            });
  for (std::size_t s = 0; s < n_setups; ++s) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t l = 0; l < n_perm; ++l) {
      if (!std::isnan(noise[s * n_perm + l])) {
        sum += noise[s * n_perm + l];
        ++count;
      }
    }
    for (auto m : kAllMeasures) {
      auto& r = result.records[s * kMeasureCount + index_of(m)];
      r.noise_fraction = count ? sum / static_cast<double>(count) : kNaN;
      summarize(r);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

using MeanTable = std::map<std::string, std::array<double, kMeasureCount>>;

MeanTable setup_means(std::span<const PerformanceRecord> records) {
  MeanTable out;
  for (const auto& r : records) {
    auto [it, inserted] = out.try_emplace(r.setup.id());
    if (inserted) it->second.fill(kNaN);
    it->second[index_of(r.measure)] = r.mean;
  }
  return out;
}

double pearson(const MeanTable& t, std::size_t a, std::size_t b) {
  std::vector<double> x, y;
  for (const auto& [_, v] : t) {
    if (std::isfinite(v[a]) && std::isfinite(v[b])) {
      x.push_back(v[a]);
      y.push_back(v[b]);
    }
  }
  if (x.size() < 2) return kNaN;
  const auto [mx, sx] = mean_and_sd(x);
  const auto [my, sy] = mean_and_sd(y);
  if (sx == 0.0 || sy == 0.0) return kNaN;
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - mx) * (y[i] - my);
  cov /= static_cast<double>(x.size() - 1);
  return std::clamp(cov / (sx * sy), -1.0, 1.0);
}

}  // namespace

CorrelationMatrix measure_correlations(std::span<const PerformanceRecord> records) {
  const auto table = setup_means(records);
  CorrelationMatrix c;
  for (std::size_t a = 0; a < kMeasureCount; ++a) {
    for (std::size_t b = a; b < kMeasureCount; ++b) {
      c.rho[a][b] = c.rho[b][a] = pearson(table, a, b);
    }
  }
  return c;
}

std::vector<Measure> prune_correlated(std::span<const PerformanceRecord> records, double threshold,
                                      std::span<const Measure> drop_priority) {
  if (setup_means(records).size() < 2) throw DataError("correlation pruning needs at least 2 setups");
  const auto c = measure_correlations(records);
  const auto priority = [&](std::size_t m) {
    const auto it = std::find(drop_priority.begin(), drop_priority.end(), kAllMeasures[m]);
    return static_cast<std::size_t>(it - drop_priority.begin());
  };
  std::array<bool, kMeasureCount> kept;
  kept.fill(true);
  while (true) {
    double best = threshold;
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    for (std::size_t a = 0; a < kMeasureCount; ++a) {
      for (std::size_t b = a + 1; b < kMeasureCount; ++b) {
        if (!kept[a] || !kept[b]) continue;
        const double r = std::abs(c.rho[a][b]);
        if (r > best) {
          best = r;
          pair = {a, b};
        }
      }
    }
    if (!pair) break;
    const auto [a, b] = *pair;
    kept[priority(a) <= priority(b) ? a : b] = false;
  }
  std::vector<Measure> out;
  for (std::size_t m = 0; m < kMeasureCount; ++m) {
    if (kept[m]) out.push_back(kAllMeasures[m]);
  }
  return out;
}

RankTable rank_setups(std::span<const PerformanceRecord> records, std::span<const Measure> retained,
                      std::size_t top_count) {
  if (retained.empty()) throw ConfigError("ranking: no measures retained");
  struct Row {
    ClusteringSetup setup;
    std::array<std::optional<double>, kMeasureCount> lower;
  };
  std::map<std::string, Row> rows;
  for (const auto& r : records) {
    auto [it, _] = rows.try_emplace(r.setup.id(), Row{r.setup, {}});
    it->second.lower[index_of(r.measure)] = r.lower;
  }

  RankTable t;
  t.retained.assign(retained.begin(), retained.end());
  std::vector<const Row*> ordered;
  for (const auto& [id, row] : rows) {
    for (auto m : retained) {
      if (!row.lower[index_of(m)]) {
        throw DataError("ranking: no record for " + id + " / " + std::string(to_string(m)));
      }
    }
    t.setups.push_back(row.setup);
    ordered.push_back(&row);
  }
  const auto n = t.setups.size();
  std::array<double, kMeasureCount> blank;
  blank.fill(kNaN);
  t.ranks.assign(n, blank);
  t.average_rank.assign(n, 0.0);

  for (auto m : retained) {
    const auto mi = index_of(m);
    const auto value = [&](std::size_t s) { return *ordered[s]->lower[mi]; };
    // Higher is better; NaN last.
    const auto better = [&](std::size_t a, std::size_t b) {
      const double va = value(a), vb = value(b);
      if (std::isnan(va)) return false;
      if (std::isnan(vb)) return true;
      return va > vb;
    };
    const auto same = [&](std::size_t a, std::size_t b) {
      const double va = value(a), vb = value(b);
      return (std::isnan(va) && std::isnan(vb)) || va == vb;
    };
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), better);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i + 1;
      while (j < n && same(idx[i], idx[j])) ++j;
      const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (auto k = i; k < j; ++k) t.ranks[idx[k]][mi] = rank;
      i = j;
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for (auto m : retained) sum += t.ranks[s][index_of(m)];
    t.average_rank[s] = sum / static_cast<double>(retained.size());
  }
  t.order.resize(n);
  std::iota(t.order.begin(), t.order.end(), 0);
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](std::size_t a, std::size_t b) { return t.average_rank[a] < t.average_rank[b]; });
  t.top.assign(t.order.begin(), t.order.begin() + static_cast<std::ptrdiff_t>(std::min(top_count, n)));
  return t;
}

TopFrequencies top_frequencies(const RankTable& table) {
  TopFrequencies f;
  f.considered = table.top.size();
  if (table.setups.size() < kTopSetupCount) {
    f.warning = "only " + std::to_string(table.setups.size()) + " setups ranked; frequencies use all of them";
  }
  if (table.top.empty()) return f;
  std::map<std::string, std::size_t> distance, algorithm;
  for (auto s : table.top) {
    const auto& setup = table.setups[s];
    ++distance[std::string(to_string(setup.distance.kind))];
    ++algorithm[std::string(to_string(setup.algorithm.kind))];
  }
  const auto total = static_cast<double>(table.top.size());
  for (const auto& [name, c] : distance) f.distance[name] = static_cast<double>(c) / total;
  for (const auto& [name, c] : algorithm) f.algorithm[name] = static_cast<double>(c) / total;
  return f;
}

BenchmarkReport analyze(BenchmarkResult result, double threshold) {
  BenchmarkReport report;
  report.correlations = measure_correlations(result.records);
  if (result.setups.size() >= 2) {
    report.retained = prune_correlated(result.records, threshold);
  } else {
    report.retained.assign(kAllMeasures.begin(), kAllMeasures.end());
  }
  report.ranks = rank_setups(result.records, report.retained);
  report.frequencies = top_frequencies(report.ranks);
  report.result = std::move(result);
  return report;
}

}  // namespace trajclust
