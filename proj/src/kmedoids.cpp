#include <algorithm>
#include <limits>
#include <numeric>

#include "cluster_internal.hpp"
#include "trajclust/cluster.hpp"
#include "trajclust/random.hpp"

namespace trajclust {

namespace {

// D^2 seeding: each new medoid is drawn with probability proportional to the
// squared distance to the closest medoid chosen so far.
std::vector<std::size_t> seed_medoids(const PairwiseMatrix& m, std::size_t k, Rng& rng) {
  const auto n = m.size();
  std::vector<std::size_t> medoids{static_cast<std::size_t>(uniform_below(rng, n))};
  std::vector<bool> chosen(n, false);
  chosen[medoids[0]] = true;
  std::vector<double> closest(m.row(medoids[0]).begin(), m.row(medoids[0]).end());
  while (medoids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i]) total += closest[i] * closest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        acc += closest[i] * closest[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      // Every remaining object coincides with a medoid: pick uniformly.
      auto nth = uniform_below(rng, n - medoids.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i] && nth-- == 0) {
          pick = i;
          break;
        }
      }
    }
    medoids.push_back(pick);
    chosen[pick] = true;
    for (std::size_t i = 0; i < n; ++i) closest[i] = std::min(closest[i], m(i, pick));
  }
  return medoids;
}

double assign(const PairwiseMatrix& m, std::vector<std::size_t>& medoids,
              std::vector<int>& labels) {
  const auto n = m.size();
  const auto k = medoids.size();
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (m(i, medoids[c]) < m(i, medoids[best])) best = c;
    }
    labels[i] = static_cast<int>(best);
    ++sizes[best];
  }
  // An empty cluster takes over, as its medoid, the object farthest from its
  // current medoid among clusters that can spare one.
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = n;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto own = static_cast<std::size_t>(labels[i]);
      if (sizes[own] < 2) continue;
      const double d = m(i, medoids[own]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    --sizes[static_cast<std::size_t>(labels[far])];
    labels[far] = static_cast<int>(c);
    medoids[c] = far;
    sizes[c] = 1;
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) cost += m(i, medoids[static_cast<std::size_t>(labels[i])]);
  return cost;
}

}  // namespace

KMedoidsResult kmedoids_detailed(const PairwiseMatrix& m, std::size_t k,
                                 const KMedoidsOptions& options) {
  const auto n = m.size();
  detail::check_cluster_count(k, n, "k-medoids");

  KMedoidsResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t restart = 0; restart < std::max<std::size_t>(1, options.restarts); ++restart) {
    Rng rng(derive_seed(options.seed, {restart}));
    auto medoids = seed_medoids(m, k, rng);
    std::vector<int> labels(n, 0);
    KMedoidsResult run;
    double cost = 0.0;
    for (run.iterations = 0; run.iterations < options.max_iterations; ++run.iterations) {
      cost = assign(m, medoids, labels);
      run.cost_history.push_back(cost);
      std::vector<std::vector<std::size_t>> members(k);
      for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);

      bool changed = false;
      for (std::size_t c = 0; c < k; ++c) {
        const auto& group = members[c];
        const auto total = [&](std::size_t x) {
          double s = 0.0;
          for (auto y : group) s += m(x, y);
          return s;
        };
        const bool current_inside =
            std::find(group.begin(), group.end(), medoids[c]) != group.end();
        std::size_t pick = current_inside ? medoids[c] : group.front();
        double pick_total = total(pick);
        for (auto x : group) {
          const double t = total(x);
          // Keep the current medoid unless strictly improved.
          if (t < pick_total) {
            pick = x;
            pick_total = t;
          }
        }
        if (pick != medoids[c]) {
          medoids[c] = pick;
          changed = true;
        }
      }
      if (!changed) break;
    }
    cost = assign(m, medoids, labels);
    if (cost < best_cost) {
      best_cost = cost;
      run.assignment.labels = labels;
      run.medoids = medoids;
      best = std::move(run);
    }
  }

  // Canonical cluster ids: order of first member.
  std::vector<int> remap(k, -1);
  int next = 0;
  for (int& l : best.assignment.labels) {
    auto& r = remap[static_cast<std::size_t>(l)];
    if (r < 0) r = next++;
    l = r;
  }
  std::vector<std::size_t> medoids(k);
  for (std::size_t c = 0; c < k; ++c) medoids[static_cast<std::size_t>(remap[c])] = best.medoids[c];
  best.medoids = std::move(medoids);
  return best;
}

ClusterAssignment kmedoids(const PairwiseMatrix& m, std::size_t k, std::uint64_t seed) {
  return kmedoids_detailed(m, k, {.seed = seed}).assignment;
}

}  // namespace trajclust
