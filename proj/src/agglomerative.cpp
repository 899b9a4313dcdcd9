#include <limits>
#include <numeric>

#include "cluster_internal.hpp"
#include "trajclust/cluster.hpp"

namespace trajclust {

namespace {

double lance_williams(Linkage linkage, double d_ik, double d_jk, std::size_t n_i, std::size_t n_j) {
  switch (linkage) {
    case Linkage::Single: return std::min(d_ik, d_jk);
    case Linkage::Complete: return std::max(d_ik, d_jk);
    case Linkage::Average:
      return (static_cast<double>(n_i) * d_ik + static_cast<double>(n_j) * d_jk) /
             static_cast<double>(n_i + n_j);
  }
  return d_ik;
}

}  // namespace

std::vector<Merge> linkage_tree(const PairwiseMatrix& m, Linkage linkage) {
  const auto n = m.size();
  std::vector<double> d = m.values();
  const auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };
  std::vector<bool> active(n, true);
  std::vector<std::size_t> sizes(n, 1);

  // nn[i]: closest active j > i (lowest j on ties). Clusters are named by
  // their lowest member, so (i, nn[i]) minimal over i is the lowest pair.
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> nn(n, none);
  std::vector<double> nn_d(n, inf);
  const auto refresh = [&](std::size_t i) {
    nn[i] = none;
    nn_d[i] = inf;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active[j] && at(i, j) < nn_d[i]) {
        nn_d[i] = at(i, j);
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::vector<Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = none;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i] && nn[i] != none && (a == none || nn_d[i] < nn_d[a])) a = i;
    }
    const std::size_t b = nn[a];
    merges.push_back({a, b, nn_d[a]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double v = lance_williams(linkage, at(a, k), at(b, k), sizes[a], sizes[b]);
      at(a, k) = at(k, a) = v;
    }
    active[b] = false;
    sizes[a] += sizes[b];

    refresh(a);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else if (k < a && (at(k, a) < nn_d[k] || (at(k, a) == nn_d[k] && a < nn[k]))) {
        nn[k] = a;
        nn_d[k] = at(k, a);
      }
    }
  }
  return merges;
}

ClusterAssignment cut_tree(const std::vector<Merge>& merges, std::size_t n, std::size_t k) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const auto steps = n >= k ? n - k : 0;
  for (std::size_t s = 0; s < steps && s < merges.size(); ++s) {
    parent[find(merges[s].right)] = find(merges[s].left);
  }
  ClusterAssignment out;
  out.labels.assign(n, 0);
  std::vector<int> id(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = id[find(i)];
    if (r < 0) r = next++;
    out.labels[i] = r;
  }
  return out;
}

ClusterAssignment agglomerative(const PairwiseMatrix& m, std::size_t k, Linkage linkage) {
  detail::check_cluster_count(k, m.size(), "agglomerative");
  return cut_tree(linkage_tree(m, linkage), m.size(), k);
}

}  // namespace trajclust
