// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"
#include "trajclust/bench.hpp"
#include "trajclust/cluster.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/metrics.hpp"
#include "trajclust/reference.hpp"

using namespace trajclust;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double ari_of(std::span<const int> a, std::span<const int> b) { return ari(ContingencyTable(a, b)); }

// --- 1 ---------------------------------------------------------------------

Outcome distance_oracles() {
  Outcome o;
  Rng rng(2024);
  for (int pair = 0; pair < 200; ++pair) {
    const auto grid = pair % 2 == 0;
    const auto len_a = 1 + uniform_below(rng, 6), len_b = 1 + uniform_below(rng, 6);
    const auto a = grid ? testing::random_grid_points(rng, len_a) : testing::random_points(rng, len_a);
    const auto b = grid ? testing::random_grid_points(rng, len_b) : testing::random_points(rng, len_b);
    const double r = grid ? 1.0 : 2.0 + 2.0 * uniform01(rng);
    const double lcss_expect =
        1.0 - static_cast<double>(oracle::lcss_length(a, b, r)) / static_cast<double>(std::min(len_a, len_b));
    o.require(std::abs(dtw(a, b) - oracle::dtw(a, b)) <= 1e-9, "dtw mismatch at pair " + std::to_string(pair));
    o.require(std::abs(lcss_distance(a, b, r) - lcss_expect) <= 1e-9, "lcss mismatch at pair " + std::to_string(pair));
    o.require(edr(a, b, r) == oracle::edr(a, b, r), "edr mismatch at pair " + std::to_string(pair));
  }
  if (o.pass) o.detail = "200 pairs";
  return o;
}

// --- 2 ---------------------------------------------------------------------

Outcome metric_oracles() {
  Outcome o;
  oracle::PermutationExpectation expect;
  std::size_t pairs = 0;
  double worst = 0.0;
  for (std::size_t n = 2; n <= 7; ++n) {
    const auto parts = oracle::all_partitions(n);
    for (const auto& r : parts) {
      for (const auto& k : parts) {
        const auto want = oracle::supervised(r, k, expect);
        const ContingencyTable t(r, k);
        const auto hcv = homogeneity_completeness_v(t);
        const double got[] = {ari(t), fmi(t), hcv.homogeneity, hcv.completeness, hcv.v_measure, ami(t)};
        const double ref[] = {want.ari, want.fmi, want.homogeneity, want.completeness, want.v, want.ami};
        for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(got[i] - ref[i]));
        ++pairs;
      }
    }
  }
  o.require(worst <= 1e-9, fmt("max deviation %.3g", worst));
  const std::vector<int> r{0, 0, 1, 1}, k{0, 1, 0, 1};
  o.require(ari_of(r, k) == -0.5, "worked example ARI != -0.5");
  o.require(fmi(ContingencyTable(r, k)) == 0.0, "worked example FMI != 0");
  if (o.pass) o.detail = std::to_string(pairs) + " partition pairs, max deviation " + fmt("%.2g", worst);
  return o;
}

// --- 3 ---------------------------------------------------------------------

Outcome metric_identities() {
  Outcome o;
  Rng rng(3);
  const auto m = point_distance_matrix(testing::random_points(rng, 10));
  const std::vector<int> ref{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const auto same = evaluate_labels(m, {ref}, ref);
  for (auto meas : kAllMeasures) {
    if (meas != Measure::Silhouette) {
      o.require(same[meas] == 1.0, std::string(to_string(meas)) + " != 1 on identical partitions");
    }
  }
  const auto single = evaluate_labels(m, {std::vector<int>(10, 0)}, ref);
  o.require(single[Measure::Homogeneity] == 0.0, "h != 0 for a single cluster");
  o.require(single[Measure::Completeness] == 1.0, "c != 1 for a single cluster");
  o.require(single[Measure::ARI] == 0.0, "ARI != 0 for a single cluster");
  o.require(single[Measure::AMI] == 0.0, "AMI != 0 for a single cluster");
  return o;
}

// --- 4 ---------------------------------------------------------------------

Outcome pinned_constants() {
  Outcome o;
  o.require(kDefaultOdThreshold == 0.01, "epsilon default");
  o.require(kDefaultPermutations == 10, "permutation count");
  o.require(std::abs(t_multiplier(kDefaultPermutations) - 2.262) < 5e-4, "t multiplier for df = 9");
  o.require(kDefaultBeta == 1.0, "V beta");
  o.require(kDefaultCorrelationThreshold == 0.75, "correlation threshold");

  Rng rng(4);
  std::vector<PerformanceRecord> records;
  for (std::size_t s = 0; s < 30; ++s) {
    const ClusteringSetup setup{s < 29 ? DistanceSpec::dtw() : DistanceSpec::sspd(),
                                AlgorithmSpec::agglomerative(Linkage::Average), 2 + s % 29};
    std::array<double, kMeasureCount> v{};
    for (auto& x : v) x = uniform01(rng);
    v[index_of(Measure::VMeasure)] = v[index_of(Measure::Homogeneity)];
    v[index_of(Measure::FMI)] = v[index_of(Measure::Silhouette)];
    for (auto m : kAllMeasures) {
      PerformanceRecord r{setup, m, std::vector<double>(10, v[index_of(m)])};
      summarize(r);
      records.push_back(r);
    }
  }
  const std::vector<Measure> expect = {Measure::Silhouette, Measure::Completeness, Measure::Homogeneity,
                                       Measure::AMI, Measure::ARI};
  o.require(prune_correlated(records) == expect, "retained set differs from {S, c, h, ARI, AMI}");
  const auto grid = SetupGrid::defaults();
  o.require(grid.distances.size() == 21, "default grid distance count");
  o.require(grid.k_min == 2 && grid.k_max == 30, "default k range");
  return o;
}

// --- 5 ---------------------------------------------------------------------

Outcome synthetic_end_to_end() {
  Outcome o;
  const auto syn = scenarios::eight_movement_intersection(50, 0.5, 5);
  const auto& ds = syn.dataset;
  std::vector<Point> origins, destinations;
  for (const auto& t : ds.trajectories) {
    origins.push_back(origin(t));
    destinations.push_back(destination(t));
  }
  const auto k_o = pick_elbow(endpoint_elbow(origins, kDefaultElbowMinK, kDefaultElbowMaxK));
  const auto k_d = pick_elbow(endpoint_elbow(destinations, kDefaultElbowMinK, kDefaultElbowMaxK));
  const auto ref = build_reference(ds, k_o, k_d, default_endpoint_algorithm(), 0.01);
  o.require(ref.cluster_count == 8, "reference has " + std::to_string(ref.cluster_count) + " clusters");
  o.require(ref.retained_count() == ds.size(), "reference dropped trajectories");
  if (!o.pass) return o;
  o.require(ari_of(ref.retained_labels(), syn.movement) == 1.0, "reference differs from planted movements");

  const SetupGrid grid{{DistanceSpec::sspd()}, {AlgorithmSpec::agglomerative(Linkage::Average)}, 2, 12};
  const auto report = analyze(run_benchmark(ds, ref, grid, {.permutations = 10, .seed = 1, .workers = 1}));
  const ClusteringSetup target{DistanceSpec::sspd(), AlgorithmSpec::agglomerative(Linkage::Average), 8};
  const auto& res = report.result;
  std::size_t s = 0;
  while (s < res.setups.size() && !(res.setups[s] == target)) ++s;
  double worst = 1.0;
  for (double v : res.record(s, Measure::ARI).values) worst = std::min(worst, v);
  o.require(worst >= 0.95, fmt("ARI %.4f < 0.95", worst));
  const auto& ranks = report.ranks;
  const auto& best = ranks.setups[ranks.order[0]];
  o.require(best == target, "first setup is " + best.id());
  o.require(ranks.order.size() < 2 || ranks.average_rank[ranks.order[0]] < ranks.average_rank[ranks.order[1]],
            "first place is shared");
  if (o.pass) {
    o.detail = "k_O=" + std::to_string(k_o) + " k_D=" + std::to_string(k_d) + ", " + target.id() +
               fmt(" min ARI %.4f, average rank %.3g", worst, ranks.average_rank[ranks.order[0]]);
  }
  return o;
}

// --- 6 ---------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto syn = scenarios::eight_movement_intersection(10, 0.5, 6);
  const auto ref = build_reference(syn.dataset, 4, 4, default_endpoint_algorithm(), 0.01);
  const SetupGrid grid{{DistanceSpec::sspd(), DistanceSpec::lcss(2), DistanceSpec::pf(0.1)},
                       SetupGrid::default_algorithms(), 2, 10};
  const auto base = fs::temp_directory_path() / "trajclust_acceptance_determinism";
  fs::remove_all(base);
  std::vector<std::string> csv;
  for (unsigned workers : {1u, 1u, 8u}) {
    const auto dir = base / std::to_string(csv.size());
    fs::create_directories(dir);
    const auto result = run_benchmark(syn.dataset, ref, grid, {.permutations = 10, .seed = 77, .workers = workers});
    write_results_csv(dir / "results.csv", result);
    std::ifstream in(dir / "results.csv", std::ios::binary);
    csv.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  o.require(csv[0] == csv[1], "two runs differ");
  o.require(csv[0] == csv[2], "1-worker and 8-worker runs differ");
  fs::remove_all(base);
  for (const auto& spec : {DistanceSpec::dtw(), DistanceSpec::lcss(3), DistanceSpec::edr(2), DistanceSpec::pf(0.05),
                           DistanceSpec::hausdorff(), DistanceSpec::sspd()}) {
    o.require(build_matrix(syn.dataset, spec, 1).values() == build_matrix(syn.dataset, spec, 8).values(),
              spec.id() + " matrix depends on the worker count");
  }
  if (o.pass) o.detail = std::to_string(csv[0].size()) + " bytes of results, 6 matrices";
  return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome silhouette_failure_mode() {
  Outcome o;
  const auto trap = scenarios::silhouette_trap(7);
  const auto m = build_matrix(trap.dataset, DistanceSpec::sspd());
  const auto s = silhouette_samples(m, {trap.predicted});
  double merged = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (trap.predicted[i] == trap.merged_label) {
      merged += s[i];
      ++count;
    }
  }
  merged /= static_cast<double>(count);
  const double wrong = ari_of(trap.truth, trap.predicted);
  const double right = ari_of(trap.truth, trap.truth);
  o.require(merged > 0.0, fmt("merged cluster silhouette %.4f <= 0", merged));
  o.require(wrong <= right - 0.1, fmt("ARI gap %.4f < 0.1", right - wrong));
  o.detail = fmt("merged silhouette %.3f, ARI %.3f vs 1", merged, wrong);
  return o;
}

// --- 8 ---------------------------------------------------------------------

Outcome permutation_invariance() {
  Outcome o;
  // Four movements sharing origin and destination arms: every algorithm has a
  // well-separated optimum here, including an eigengap at k = 4 for spectral.
  const std::vector<Movement> moves = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  const auto syn = make_intersection(moves, std::vector<std::size_t>(4, 15), 0.5, 8);
  const auto m = build_matrix(syn.dataset, DistanceSpec::sspd());
  const std::vector<std::pair<std::string, std::function<ClusterAssignment(const PairwiseMatrix&)>>> algorithms = {
      {"kmedoids", [](const PairwiseMatrix& x) { return kmedoids(x, 4, 0); }},
      {"agglomerative/complete", [](const PairwiseMatrix& x) { return agglomerative(x, 4, Linkage::Complete); }},
      {"agglomerative/average", [](const PairwiseMatrix& x) { return agglomerative(x, 4, Linkage::Average); }},
      {"agglomerative/single", [](const PairwiseMatrix& x) { return agglomerative(x, 4, Linkage::Single); }},
      {"spectral", [](const PairwiseMatrix& x) { return spectral(x, 4, 0); }},
      {"dbscan", [](const PairwiseMatrix& x) { return dbscan(x, 3.0, 4); }},
      {"optics", [](const PairwiseMatrix& x) { return optics(x, 4); }},
  };
  for (const auto& [name, run] : algorithms) {
    const auto base = run(m);
    for (std::uint64_t p = 0; p < 10; ++p) {
      const auto order = random_permutation(m.size(), 100 + p);
      const auto permuted = run(m.reordered(order));
      std::vector<int> back(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) back[order[i]] = permuted.labels[i];
      o.require(ari_of(base.labels, back) == 1.0, name + " changes under permutation " + std::to_string(p));
    }
  }

  Rng rng(9);
  const auto ref = syn.movement;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> pred;
    for (std::size_t i = 0; i < m.size(); ++i) pred.push_back(static_cast<int>(uniform_below(rng, 6)) - 1);
    const auto relabel = [&](const std::vector<int>& l) {
      const auto map = random_permutation(16, rng());
      std::vector<int> out;
      for (int x : l) out.push_back(x < 0 ? x : static_cast<int>(map[static_cast<std::size_t>(x)]) + 20);
      return out;
    };
    const auto a = evaluate_labels(m, {pred}, ref);
    const auto b = evaluate_labels(m, {relabel(pred)}, relabel(ref));
    for (auto meas : kAllMeasures) {
      o.require(std::abs(a[meas] - b[meas]) <= 1e-12, std::string(to_string(meas)) + " depends on label names");
    }
  }
  if (o.pass) o.detail = "7 algorithms x 10 permutations, 7 measures";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 = no limit
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "distance oracle equivalence", 10.0, distance_oracles},
      {2, "metric oracle equivalence", 60.0, metric_oracles},
      {3, "metric identities", 0.0, metric_identities},
      {4, "pinned constants", 0.0, pinned_constants},
      {5, "synthetic end-to-end", 300.0, synthetic_end_to_end},
      {6, "determinism", 0.0, determinism},
      {7, "silhouette failure mode", 0.0, silhouette_failure_mode},
      {8, "permutation invariance", 0.0, permutation_invariance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += fmt(" (over the %.0f s limit)", c.limit_seconds);
    }
    std::printf("%s criterion %d: %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
