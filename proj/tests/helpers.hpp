#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "trajclust/core.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/random.hpp"

namespace testing {

using namespace trajclust;

/// Points (x, y) with timestamps 0, 1, 2, ...
inline std::vector<Point> xy(std::initializer_list<std::pair<double, double>> pts) {
  std::vector<Point> out;
  double t = 0.0;
  for (const auto& [x, y] : pts) out.push_back({x, y, t++});
  return out;
}

inline Trajectory traj(std::string id, std::initializer_list<std::pair<double, double>> pts) {
  return {std::move(id), xy(pts)};
}

inline std::vector<Point> random_points(Rng& rng, std::size_t n, double scale = 10.0) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({scale * uniform01(rng), scale * uniform01(rng), static_cast<double>(i)});
  }
  return out;
}

/// Integer grid coordinates, useful to provoke exact threshold ties.
inline std::vector<Point> random_grid_points(Rng& rng, std::size_t n, int side = 4) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({static_cast<double>(uniform_below(rng, side)),
                   static_cast<double>(uniform_below(rng, side)), static_cast<double>(i)});
  }
  return out;
}

inline PairwiseMatrix matrix(std::size_t n, std::vector<double> upper) {
  std::vector<double> v(n * n, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = upper.at(k++);
  }
  return PairwiseMatrix(n, std::move(v));
}

/// Matrix of Euclidean distances between points on a line.
inline PairwiseMatrix line_matrix(std::initializer_list<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x, 0.0, 0.0});
  return point_distance_matrix(pts);
}

}  // namespace testing
