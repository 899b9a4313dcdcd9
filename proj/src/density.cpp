#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <tuple>

#include "trajclust/cluster.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

ClusterAssignment dbscan(const PairwiseMatrix& m, double radius, std::size_t min_points) {
  if (!(radius >= 0.0)) throw ConfigError("DBSCAN: d_z must be >= 0");
  if (min_points < 1) throw ConfigError("DBSCAN: n_z_min must be >= 1");
  const auto n = m.size();
  const auto neighbors = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      if (m(i, j) <= radius) out.push_back(j);
    }
    return out;
  };

  constexpr int unvisited = -2;
  ClusterAssignment out;
  out.labels.assign(n, unvisited);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] != unvisited) continue;
    auto seeds = neighbors(i);
    if (seeds.size() < min_points) {
      out.labels[i] = ClusterAssignment::kNoise;  // may become a border point later
      continue;
    }
    const int cluster = next++;
    out.labels[i] = cluster;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const auto q = queue.front();
      queue.pop_front();
      if (out.labels[q] == ClusterAssignment::kNoise) out.labels[q] = cluster;
      if (out.labels[q] != unvisited) continue;
      out.labels[q] = cluster;
      auto reach = neighbors(q);
      if (reach.size() >= min_points) queue.insert(queue.end(), reach.begin(), reach.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

OpticsOrdering optics_ordering(const PairwiseMatrix& m, std::size_t min_points) {
  if (min_points < 1) throw ConfigError("OPTICS: n_z_min must be >= 1");
  const auto n = m.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  OpticsOrdering o;
  o.reachability.assign(n, inf);
  o.core_distance.assign(n, inf);
  o.predecessor.assign(n, -1);
  o.ordering.reserve(n);

  if (min_points <= n) {
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
      row.assign(m.row(i).begin(), m.row(i).end());
      std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(min_points - 1),
                       row.end());
      o.core_distance[i] = row[min_points - 1];
    }
  }

  std::vector<bool> processed(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    // Smallest reachability among unprocessed, then smallest core distance,
    // then lowest index. The core-distance key keeps the ordering independent
    // of object order unless core distances tie exactly.
    std::size_t point = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (processed[i]) continue;
      if (point == n || std::tie(o.reachability[i], o.core_distance[i]) <
                            std::tie(o.reachability[point], o.core_distance[point])) {
        point = i;
      }
    }
    processed[point] = true;
    o.ordering.push_back(point);
    if (!std::isfinite(o.core_distance[point])) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (processed[j]) continue;
      const double r = std::max(m(point, j), o.core_distance[point]);
      if (r < o.reachability[j]) {
        o.reachability[j] = r;
        o.predecessor[j] = static_cast<std::ptrdiff_t>(point);
      }
    }
  }
  return o;
}

namespace {

struct SteepDownArea {
  std::size_t start;
  std::size_t end;
  double mib;
};

// Extends a steep region from `start` while points stay steep, allowing at
// most `min_points` consecutive non-steep points that still go the same way.
std::size_t extend_region(const std::vector<bool>& steep, const std::vector<bool>& opposite,
                          std::size_t start, std::size_t min_points) {
  std::size_t non_xward = 0;
  std::size_t end = start;
  for (std::size_t index = start; index < steep.size(); ++index) {
    if (steep[index]) {
      non_xward = 0;
      end = index;
    } else if (!opposite[index]) {
      if (++non_xward > min_points) break;
    } else {
      return end;
    }
  }
  return end;
}

void update_filter(std::vector<SteepDownArea>& areas, double mib, double xi_complement,
                   const std::vector<double>& reach) {
  if (std::isinf(mib)) {
    areas.clear();
    return;
  }
  std::erase_if(areas, [&](const SteepDownArea& a) { return mib > reach[a.start] * xi_complement; });
  for (auto& a : areas) a.mib = std::max(a.mib, mib);
}

// Shrinks [s, e] from the right until its end point is plausibly part of the
// cluster (its predecessor lies inside the range).
bool correct_predecessor(const std::vector<double>& reach, const OpticsOrdering& o,
                         std::size_t& s, std::size_t& e) {
  while (s < e) {
    if (reach[s] > reach[e]) return true;
    const auto p_e = o.predecessor[o.ordering[e]];
    for (std::size_t i = s; i < e; ++i) {
      if (p_e == static_cast<std::ptrdiff_t>(o.ordering[i])) return true;
    }
    --e;
  }
  return false;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> optics_xi_clusters(const OpticsOrdering& o,
                                                                    double xi,
                                                                    std::size_t min_points) {
  const auto n = o.ordering.size();
  // Reachability plot in processing order with a trailing +inf sentinel so a
  // cluster can close at the end of the plot.
  std::vector<double> reach(n + 1, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) reach[i] = o.reachability[o.ordering[i]];

  const double xi_complement = 1.0 - xi;
  std::vector<bool> steep_up(n), steep_down(n), up(n), down(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = reach[i] / reach[i + 1];  // NaN for inf/inf: never steep
    steep_up[i] = ratio <= xi_complement;
    steep_down[i] = ratio >= 1.0 / xi_complement;
    down[i] = ratio > 1.0;
    up[i] = ratio < 1.0;
  }

  std::vector<SteepDownArea> areas;
  std::vector<std::pair<std::size_t, std::size_t>> clusters;
  std::size_t index = 0;
  double mib = 0.0;
  for (std::size_t steep_index = 0; steep_index < n; ++steep_index) {
    if (!(steep_up[steep_index] || steep_down[steep_index])) continue;
    if (steep_index < index) continue;
    mib = std::max(mib, *std::max_element(reach.begin() + static_cast<std::ptrdiff_t>(index),
                                          reach.begin() + static_cast<std::ptrdiff_t>(steep_index) + 1));
    if (steep_down[steep_index]) {
      update_filter(areas, mib, xi_complement, reach);
      const auto d_end = extend_region(steep_down, up, steep_index, min_points);
      areas.push_back({steep_index, d_end, 0.0});
      index = d_end + 1;
      mib = reach[index];
      continue;
    }

    update_filter(areas, mib, xi_complement, reach);
    const auto u_start = steep_index;
    const auto u_end = extend_region(steep_up, down, u_start, min_points);
    index = u_end + 1;
    mib = reach[index];

    std::vector<std::pair<std::size_t, std::size_t>> found;
    for (const auto& area : areas) {
      std::size_t c_start = area.start;
      std::size_t c_end = u_end;
      if (reach[c_end + 1] * xi_complement < area.mib) continue;

      const double d_max = reach[area.start];
      if (d_max * xi_complement >= reach[c_end + 1]) {
        while (reach[c_start + 1] > reach[c_end + 1] && c_start < area.end) ++c_start;
      } else if (reach[c_end + 1] * xi_complement >= d_max) {
        while (reach[c_end - 1] > d_max && c_end > u_start) --c_end;
      }
      if (!correct_predecessor(reach, o, c_start, c_end)) continue;
      if (c_end - c_start + 1 < min_points) continue;
      if (c_start > area.end) continue;
      if (c_end < u_start) continue;
      found.emplace_back(c_start, c_end);
    }
    // Smaller (later-opened) clusters first.
    clusters.insert(clusters.end(), found.rbegin(), found.rend());
  }
  return clusters;
}

ClusterAssignment optics(const PairwiseMatrix& m, std::size_t min_points, double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("OPTICS: xi must lie in (0, 1)");
  const auto o = optics_ordering(m, min_points);
  const auto clusters = optics_xi_clusters(o, xi, std::max<std::size_t>(min_points, 2));
  const auto n = m.size();
  std::vector<int> by_position(n, ClusterAssignment::kNoise);
  int next = 0;
  for (const auto& [start, end] : clusters) {
    const bool free = std::all_of(by_position.begin() + static_cast<std::ptrdiff_t>(start),
                                  by_position.begin() + static_cast<std::ptrdiff_t>(end) + 1,
                                  [](int l) { return l == ClusterAssignment::kNoise; });
    if (!free) continue;
    std::fill(by_position.begin() + static_cast<std::ptrdiff_t>(start),
              by_position.begin() + static_cast<std::ptrdiff_t>(end) + 1, next++);
  }
  ClusterAssignment out;
  out.labels.assign(n, ClusterAssignment::kNoise);
  for (std::size_t pos = 0; pos < n; ++pos) out.labels[o.ordering[pos]] = by_position[pos];
  return out;
}

}  // namespace trajclust
