#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "trajclust/bench.hpp"
#include "trajclust/error.hpp"
#include "trajclust/synthetic.hpp"

using namespace trajclust;

namespace {

ClusteringSetup setup_k(std::size_t k, DistanceSpec d = DistanceSpec::dtw(),
                        AlgorithmSpec a = AlgorithmSpec::agglomerative(Linkage::Average)) {
  return {d, a, k};
}

// Records whose every permutation value equals the given per-measure value.
std::vector<PerformanceRecord> constant_records(const std::vector<ClusteringSetup>& setups,
                                                const std::vector<std::array<double, kMeasureCount>>& v,
                                                std::size_t n = 10) {
  std::vector<PerformanceRecord> out;
  for (std::size_t s = 0; s < setups.size(); ++s) {
    for (auto m : kAllMeasures) {
      PerformanceRecord r{setups[s], m, std::vector<double>(n, v[s][index_of(m)])};
      summarize(r);
      out.push_back(r);
    }
  }
  return out;
}

std::size_t index_by_id(const RankTable& t, const ClusteringSetup& s) {
  for (std::size_t i = 0; i < t.setups.size(); ++i) {
    if (t.setups[i] == s) return i;
  }
  FAIL("setup not in table");
  return 0;
}

struct Fixture {
  SyntheticDataset syn;
  ReferenceClusters ref;
};

Fixture small_intersection(std::size_t per_movement = 10) {
  const std::vector<Movement> mv = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  Fixture f;
  f.syn = make_intersection(mv, std::vector<std::size_t>(4, per_movement), 0.5, 17);
  f.ref = build_reference(f.syn.dataset, 2, 2);
  return f;
}

}  // namespace

TEST_CASE("default grid") {
  const auto g = SetupGrid::defaults();
  CHECK(g.distances.size() == 21);
  CHECK(g.algorithms.size() == 5);
  CHECK(g.k_min == 2);
  CHECK(g.k_max == 30);
  const auto setups = g.setups();
  CHECK(setups.size() == 21 * 5 * 29);
  std::set<std::string> ids;
  for (const auto& s : setups) ids.insert(s.id());
  CHECK(ids.size() == setups.size());
  CHECK(kDefaultPermutations == 10);
  CHECK(kDefaultCorrelationThreshold == 0.75);
  CHECK(kTopSetupCount == 10);

  SetupGrid bad = g;
  bad.k_min = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = g;
  bad.distances.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  SetupGrid density{{DistanceSpec::dtw()}, {AlgorithmSpec::dbscan(2, 3)}, 2, 5};
  CHECK(density.setups().size() == 1);
}

TEST_CASE("lower bound examples") {
  CHECK(t_multiplier(10) == doctest::Approx(2.262).epsilon(2e-4));
  CHECK(t_multiplier(2) == doctest::Approx(12.706).epsilon(1e-4));
  const std::vector<double> flat(10, 0.7);
  CHECK(lower_bound(flat) == 0.7);
  std::vector<double> spread;
  const double d = 0.1 * std::sqrt(0.9);
  for (int i = 0; i < 5; ++i) {
    spread.push_back(0.5 + d);
    spread.push_back(0.5 - d);
  }
  CHECK(lower_bound(spread) == doctest::Approx(0.5 - t_multiplier(10) * 0.1 / std::sqrt(10.0)));
  CHECK(lower_bound(spread) == doctest::Approx(0.4285).epsilon(1e-4));
  const std::vector<double> two = {0.0, 1.0};
  CHECK(lower_bound(two) < 0.0);
  CHECK(lower_bound(two) == doctest::Approx(0.5 - 12.706 * std::sqrt(0.5) / std::sqrt(2.0)).epsilon(1e-4));
  CHECK_THROWS_AS(lower_bound(std::vector<double>{1.0}), ConfigError);

  PerformanceRecord r{setup_k(2), Measure::ARI, {0.2, NAN, 0.4}};
  summarize(r);
  CHECK(std::isnan(r.mean));
  CHECK(std::isnan(r.lower));
}

TEST_CASE("pruning reproduces the retained measure set") {
  Rng rng(1);
  std::vector<ClusteringSetup> setups;
  std::vector<std::array<double, kMeasureCount>> v;
  for (std::size_t s = 0; s < 40; ++s) {
    setups.push_back(setup_k(2 + s % 29, s < 29 ? DistanceSpec::dtw() : DistanceSpec::sspd()));
    std::array<double, kMeasureCount> row{};
    for (auto& x : row) x = uniform01(rng);
    row[index_of(Measure::VMeasure)] = row[index_of(Measure::Homogeneity)];
    row[index_of(Measure::FMI)] = row[index_of(Measure::Silhouette)];
    v.push_back(row);
  }
  const auto records = constant_records(setups, v);
  const auto rho = measure_correlations(records).rho;
  CHECK(rho[index_of(Measure::VMeasure)][index_of(Measure::Homogeneity)] == doctest::Approx(1.0));
  const std::vector<Measure> expect = {Measure::Silhouette, Measure::Completeness,
                                       Measure::Homogeneity, Measure::AMI, Measure::ARI};
  CHECK(prune_correlated(records) == expect);
  CHECK(prune_correlated(records, 1.1).size() == 7);

  // An exact duplicate of ARI drops AMI, which comes first in the priority.
  for (auto& row : v) row[index_of(Measure::AMI)] = row[index_of(Measure::ARI)];
  const auto dup = prune_correlated(constant_records(setups, v));
  CHECK(std::find(dup.begin(), dup.end(), Measure::AMI) == dup.end());
  CHECK(std::find(dup.begin(), dup.end(), Measure::ARI) != dup.end());

  CHECK_THROWS_AS(prune_correlated(constant_records({setups[0]}, {v[0]})), DataError);
}

TEST_CASE("rank ties share the average rank") {
  const std::vector<ClusteringSetup> setups = {setup_k(2), setup_k(3)};
  const auto records = constant_records(setups, {{0.5, 0.5, 0.5, 0.5, 0.5, 0.9, 0.5},
                                                 {0.5, 0.5, 0.5, 0.5, 0.5, 0.1, 0.5}});
  const std::vector<Measure> retained = {Measure::Silhouette, Measure::ARI};
  const auto t = rank_setups(records, retained);
  for (std::size_t s = 0; s < 2; ++s) CHECK(t.ranks[s][index_of(Measure::Silhouette)] == 1.5);
  const auto k2 = index_by_id(t, setups[0]);
  CHECK(t.ranks[k2][index_of(Measure::ARI)] == 1.0);
  CHECK(t.average_rank[k2] == 1.25);
  CHECK(t.order.front() == k2);
  CHECK(std::isnan(t.ranks[k2][index_of(Measure::FMI)]));
}

TEST_CASE("three setups against a hand-ranked table") {
  const auto a = setup_k(2), b = setup_k(3), c = setup_k(4);
  auto row = [](double s, double comp, double h, double ari_v, double ami_v) {
    std::array<double, kMeasureCount> r{};
    r[index_of(Measure::Silhouette)] = s;
    r[index_of(Measure::Completeness)] = comp;
    r[index_of(Measure::Homogeneity)] = h;
    r[index_of(Measure::ARI)] = ari_v;
    r[index_of(Measure::AMI)] = ami_v;
    return r;
  };
  const auto records = constant_records(
      {a, b, c}, {row(0.5, 0.9, 0.3, 0.7, 0.2), row(0.6, 0.8, 0.3, 0.1, 0.5), row(0.4, 0.7, 0.9, 0.2, 0.5)});
  const std::vector<Measure> retained = {Measure::Silhouette, Measure::Completeness,
                                         Measure::Homogeneity, Measure::AMI, Measure::ARI};
  const auto t = rank_setups(records, retained);
  CHECK(t.average_rank[index_by_id(t, a)] == doctest::Approx(9.5 / 5));
  CHECK(t.average_rank[index_by_id(t, b)] == doctest::Approx(10.0 / 5));
  CHECK(t.average_rank[index_by_id(t, c)] == doctest::Approx(10.5 / 5));
  CHECK(t.order == std::vector<std::size_t>{index_by_id(t, a), index_by_id(t, b), index_by_id(t, c)});
  CHECK(t.ranks[index_by_id(t, c)][index_of(Measure::Homogeneity)] == 1.0);
  CHECK(t.ranks[index_by_id(t, a)][index_of(Measure::Homogeneity)] == 2.5);

  auto missing = records;
  missing.erase(std::find_if(missing.begin(), missing.end(), [&](const PerformanceRecord& r) {
    return r.setup == c && r.measure == Measure::ARI;
  }));
  CHECK_THROWS_AS(rank_setups(missing, retained), DataError);
}

TEST_CASE("ranking ignores record order and measure offsets") {
  Rng rng(2);
  std::vector<ClusteringSetup> setups;
  std::vector<std::array<double, kMeasureCount>> v;
  for (std::size_t s = 0; s < 15; ++s) {
    setups.push_back(setup_k(2 + s));
    std::array<double, kMeasureCount> row{};
    for (auto& x : row) x = std::round(uniform01(rng) * 5) / 5;  // coarse values provoke ties
    v.push_back(row);
  }
  const auto records = constant_records(setups, v);
  const std::vector<Measure> retained = {Measure::Silhouette, Measure::ARI, Measure::AMI};
  const auto base = rank_setups(records, retained);
  CHECK(base.top.size() == 10);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<PerformanceRecord> shuffled;
    for (auto i : random_permutation(records.size(), rng())) shuffled.push_back(records[i]);
    const auto t = rank_setups(shuffled, retained);
    CHECK(t.average_rank == base.average_rank);
    CHECK(t.order == base.order);
  }
  auto shifted = records;
  for (auto& r : shifted) {
    if (r.measure == Measure::ARI) r.lower += 0.25;
  }
  const auto moved = rank_setups(shifted, retained);
  for (std::size_t i = 0; i < base.ranks.size(); ++i) {
    for (auto m : retained) CHECK(moved.ranks[i][index_of(m)] == base.ranks[i][index_of(m)]);
  }
  double sum = 0;
  for (const auto& r : base.ranks) sum += r[index_of(Measure::ARI)];
  CHECK(sum == doctest::Approx(15.0 * 16.0 / 2.0));
}

TEST_CASE("top frequencies by kind") {
  RankTable t;
  for (std::size_t i = 0; i < 10; ++i) {
    t.setups.push_back(setup_k(2 + i, DistanceSpec::lcss(1.0 + static_cast<double>(i % 3)),
                               i < 7 ? AlgorithmSpec::agglomerative(Linkage::Single)
                                     : AlgorithmSpec::spectral()));
    t.top.push_back(i);
  }
  const auto f = top_frequencies(t);
  CHECK(f.considered == 10);
  CHECK(f.distance.at("LCSS") == 1.0);
  CHECK(f.algorithm.at("Agglomerative") == doctest::Approx(0.7));
  CHECK(f.algorithm.at("Spectral") == doctest::Approx(0.3));
  CHECK_FALSE(f.warning);
  t.setups.resize(4);
  t.top.resize(4);
  const auto few = top_frequencies(t);
  CHECK(few.warning);
  CHECK(few.considered == 4);
}

TEST_CASE("benchmark counting contract and deterministic algorithms") {
  const auto f = small_intersection();
  const SetupGrid grid{{DistanceSpec::sspd()}, {AlgorithmSpec::agglomerative(Linkage::Average)}, 2, 3};
  const auto r = run_benchmark(f.syn.dataset, f.ref, grid, {.permutations = 2, .seed = 3});
  CHECK(r.setups.size() == 2);
  CHECK(r.records.size() == 2 * kMeasureCount);
  std::size_t values = 0;
  for (const auto& rec : r.records) {
    values += rec.values.size();
    CHECK(rec.stddev == 0.0);
    CHECK(rec.lower == rec.mean);
  }
  CHECK(values == 28);
  CHECK(r.failures.empty());
  CHECK_FALSE(r.all_failed());
}

TEST_CASE("planted structure is recovered and ranked ahead") {
  const auto f = small_intersection();
  const SetupGrid grid{{DistanceSpec::sspd(), DistanceSpec::lcss(1)},
                       {AlgorithmSpec::agglomerative(Linkage::Average), AlgorithmSpec::kmedoids()},
                       2,
                       6};
  auto report = analyze(run_benchmark(f.syn.dataset, f.ref, grid, {.permutations = 3, .seed = 1}));
  const auto& res = report.result;
  const ClusteringSetup planted{DistanceSpec::sspd(), AlgorithmSpec::agglomerative(Linkage::Average), 4};
  const auto it = std::find(res.setups.begin(), res.setups.end(), planted);
  REQUIRE(it != res.setups.end());
  const auto s = static_cast<std::size_t>(it - res.setups.begin());
  for (auto m : {Measure::Completeness, Measure::Homogeneity, Measure::VMeasure, Measure::AMI,
                 Measure::ARI, Measure::FMI}) {
    for (double v : res.record(s, m).values) CHECK(v == 1.0);
  }
  const auto rs = index_by_id(report.ranks, planted);
  for (std::size_t o = 0; o < res.setups.size(); ++o) {
    if (!(res.record(o, Measure::ARI).mean < 1.0)) continue;
    CHECK(report.ranks.average_rank[rs] < report.ranks.average_rank[index_by_id(report.ranks, res.setups[o])]);
  }
}

TEST_CASE("benchmark is reproducible and independent of the worker count") {
  const auto f = small_intersection(8);
  const SetupGrid grid{{DistanceSpec::hausdorff(), DistanceSpec::edr(2)},
                       {AlgorithmSpec::kmedoids(4), AlgorithmSpec::spectral(2)},
                       2,
                       5};
  const auto a = run_benchmark(f.syn.dataset, f.ref, grid, {.permutations = 3, .seed = 9, .workers = 1});
  const auto b = run_benchmark(f.syn.dataset, f.ref, grid, {.permutations = 3, .seed = 9, .workers = 4});
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].setup == b.records[i].setup);
    const auto& va = a.records[i].values;
    const auto& vb = b.records[i].values;
    CHECK(std::equal(va.begin(), va.end(), vb.begin(), vb.end(), [](double x, double y) {
      return (std::isnan(x) && std::isnan(y)) || x == y;
    }));
  }
}

TEST_CASE("oversized k is recorded as a failure") {
  const auto f = small_intersection(2);
  const SetupGrid grid{{DistanceSpec::dtw()}, {AlgorithmSpec::agglomerative(Linkage::Single)}, 7, 9};
  const auto r = run_benchmark(f.syn.dataset, f.ref, grid, {.permutations = 2});
  CHECK(r.failures.size() == 2);
  for (const auto& fail : r.failures) CHECK(fail.setup_id == "DTW/Agglomerative[linkage=single]/k=9");
  CHECK(std::isnan(r.record(2, Measure::ARI).values[0]));
  CHECK_FALSE(r.all_failed());
}

TEST_CASE("benchmark matrix cache") {
  const auto dir = std::filesystem::temp_directory_path() / "trajclust_test_bench_cache";
  std::filesystem::remove_all(dir);
  const auto f = small_intersection(5);
  const SetupGrid grid{{DistanceSpec::pf(0.1)}, {AlgorithmSpec::agglomerative(Linkage::Complete)}, 2, 4};
  BenchmarkOptions opts{.permutations = 2, .cache_dir = dir};
  const auto first = run_benchmark(f.syn.dataset, f.ref, grid, opts);
  CHECK(std::filesystem::exists(dir / cache_file_name(DistanceSpec::pf(0.1))));
  const auto second = run_benchmark(f.syn.dataset, f.ref, grid, opts);
  CHECK(first.records.size() == second.records.size());
  for (std::size_t i = 0; i < first.records.size(); ++i) CHECK(first.records[i].values == second.records[i].values);

  const auto other = small_intersection(6);
  CHECK_THROWS_AS(run_benchmark(other.syn.dataset, other.ref, grid, opts), CacheMismatchError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report files") {
  const auto dir = std::filesystem::temp_directory_path() / "trajclust_test_reports";
  std::filesystem::remove_all(dir);
  const auto f = small_intersection(5);
  const SetupGrid grid{{DistanceSpec::sspd()}, {AlgorithmSpec::agglomerative(Linkage::Average)}, 2, 5};
  const auto report = analyze(run_benchmark(f.syn.dataset, f.ref, grid, {.permutations = 2}));
  const auto files = write_reports(dir, report);
  CHECK(files.size() == 4);
  for (const auto& p : files) CHECK(std::filesystem::file_size(p) > 0);
  std::ifstream in(dir / "summary.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "setup_id,measure,mean,std,lower_bound,noise_fraction");
  std::filesystem::remove_all(dir);
}
