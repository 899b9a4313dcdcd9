#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include "doctest.h"
#include "helpers.hpp"
#include "trajclust/error.hpp"

using namespace trajclust;
using testing::traj;

TEST_CASE("origin and destination are the first and last points") {
  const auto t = traj("a", {{0, 0}, {1, 1}, {5, 2}});
  CHECK(origin(t) == t.points.front());
  CHECK(destination(t) == t.points.back());
  CHECK(destination(t).x == 5.0);
}

TEST_CASE("validate_dataset names every rule") {
  TrajectoryDataset ds;
  CHECK(validate_dataset(ds).empty());
  ds.trajectories.push_back(traj("ok", {{0, 0}, {1, 0}}));
  CHECK(validate_dataset(ds).empty());

  ds.trajectories.push_back(traj("ok", {{0, 0}, {1, 0}}));
  ds.trajectories.push_back(traj("short", {{0, 0}}));
  auto backwards = traj("back", {{0, 0}, {1, 0}});
  backwards.points[1].t = 0.0;
  ds.trajectories.push_back(backwards);
  auto bad = traj("nan", {{0, 0}, {1, 0}});
  bad.points[0].x = std::numeric_limits<double>::quiet_NaN();
  ds.trajectories.push_back(bad);

  std::set<std::pair<std::string, ViolationRule>> got;
  for (const auto& v : validate_dataset(ds)) got.emplace(v.trajectory_id, v.rule);
  CHECK(got.contains({"ok", ViolationRule::DuplicateId}));
  CHECK(got.contains({"short", ViolationRule::TooShort}));
  CHECK(got.contains({"back", ViolationRule::TimestampOrder}));
  CHECK(got.contains({"nan", ViolationRule::NonFinite}));
}

TEST_CASE("distance spec parameters must match the kind") {
  CHECK_NOTHROW(DistanceSpec::lcss(2).validate());
  CHECK_THROWS_AS((DistanceSpec{DistanceKind::LCSS, {}, {}, false}.validate()), ConfigError);
  CHECK_THROWS_AS(DistanceSpec::lcss(0).validate(), ConfigError);
  CHECK_THROWS_AS((DistanceSpec{DistanceKind::DTW, 1.0, {}, false}.validate()), ConfigError);
  CHECK_THROWS_AS(DistanceSpec::pf(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(DistanceSpec::pf(1.5).validate(), ConfigError);
  CHECK_NOTHROW(DistanceSpec::pf(1.0).validate());
  CHECK(DistanceSpec::lcss(2).id() == "LCSS[r_b=2]");
  CHECK(DistanceSpec::pf(0.05).id() == "PF[w=0.05]");
  CHECK(DistanceSpec::sspd().id() == "SSPD");
}

TEST_CASE("algorithm spec parameters must match the kind") {
  CHECK_NOTHROW(AlgorithmSpec::agglomerative(Linkage::Average).validate());
  CHECK_THROWS_AS((AlgorithmSpec{AlgorithmKind::Agglomerative, {}, {}, {}, {}}.validate()),
                  ConfigError);
  CHECK_THROWS_AS(AlgorithmSpec::dbscan(-1.0, 3).validate(), ConfigError);
  CHECK_THROWS_AS(AlgorithmSpec::optics(0).validate(), ConfigError);
  CHECK(parse_algorithm_kind("k-medoids") == AlgorithmKind::KMedoids);
  CHECK(parse_algorithm_kind("hierarchical") == AlgorithmKind::Agglomerative);
  CHECK_THROWS_AS(parse_algorithm_kind("birch"), ConfigError);
  for (auto k : {DistanceKind::DTW, DistanceKind::LCSS, DistanceKind::EDR, DistanceKind::PF,
                 DistanceKind::Hausdorff, DistanceKind::SSPD}) {
    CHECK(parse_distance_kind(to_string(k)) == k);
  }
}

TEST_CASE("cluster count is present exactly for k-consuming algorithms") {
  const auto agg = AlgorithmSpec::agglomerative(Linkage::Single);
  CHECK_NOTHROW((ClusteringSetup{DistanceSpec::dtw(), agg, 5}.validate()));
  CHECK_THROWS_WITH_AS((ClusteringSetup{DistanceSpec::dtw(), agg, {}}.validate()),
                       doctest::Contains("k required"), ConfigError);
  CHECK_THROWS_WITH_AS((ClusteringSetup{DistanceSpec::dtw(), AlgorithmSpec::dbscan(1, 3), 4}.validate()),
                       doctest::Contains("k not an input"), ConfigError);
  CHECK_THROWS_AS((ClusteringSetup{DistanceSpec::dtw(), agg, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((ClusteringSetup{DistanceSpec::dtw(), agg, 31}.validate()), ConfigError);
  CHECK_NOTHROW((ClusteringSetup{DistanceSpec::dtw(), agg, 30}.validate()));
}

TEST_CASE("setups compare and hash structurally") {
  const ClusteringSetup a{DistanceSpec::lcss(3), AlgorithmSpec::kmedoids(), 4};
  const ClusteringSetup b{DistanceSpec::lcss(3), AlgorithmSpec::kmedoids(), 4};
  const ClusteringSetup c{DistanceSpec::lcss(5), AlgorithmSpec::kmedoids(), 4};
  CHECK(a == b);
  CHECK(a != c);
  CHECK(std::hash<ClusteringSetup>{}(a) == std::hash<ClusteringSetup>{}(b));
  std::unordered_set<ClusteringSetup> set{a, b, c};
  CHECK(set.size() == 2);
  CHECK(a.id() == "LCSS[r_b=3]/KMedoids/k=4");
}

TEST_CASE("cluster assignment counts ignore noise") {
  const ClusterAssignment a{{0, 0, 2, -1, 2, -1}};
  CHECK(a.cluster_count() == 2);
  CHECK(a.noise_count() == 2);
}

TEST_CASE("seed derivation and permutations are reproducible") {
  CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
  CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
  CHECK(derive_seed(7, {1}) != derive_seed(8, {1}));
  const auto p = random_permutation(50, 11);
  CHECK(p == random_permutation(50, 11));
  std::set<std::size_t> seen(p.begin(), p.end());
  CHECK(seen.size() == 50);
  CHECK(*seen.rbegin() == 49);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(uniform_below(rng, 7) < 7);
    const double u = uniform01(rng);
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("standard normal draws have unit variance") {
  Rng rng(5);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}
