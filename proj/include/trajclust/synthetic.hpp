#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trajclust/core.hpp"
#include "trajclust/random.hpp"

namespace trajclust {

/// A movement through a 4-arm intersection centered at the origin. Arms are
/// numbered counter-clockwise from east (0 = east, 1 = north, 2 = west,
/// 3 = south). Traffic keeps right.
struct Movement {
  int from_arm;
  int to_arm;
};

struct IntersectionGeometry {
  double arm_length = 60.0;       // center to arm end
  double junction_radius = 12.0;  // where the lanes start turning
  double lane_offset = 3.0;       // lane center to road axis
  double spacing = 2.5;           // distance between samples
  double speed = 10.0;            // for timestamps
};

/// Through movement and right turn from every arm.
std::vector<Movement> eight_movements();

/// Noise-free lane centerline of a movement, resampled at `spacing`, with
/// timestamps at constant speed starting at t = 0.
std::vector<Point> movement_path(const Movement& mv, const IntersectionGeometry& geometry = {});

/// Copy of the first `keep_fraction` of a path, each point shifted along the
/// path normal by N(0, lateral_noise^2).
Trajectory noisy_trajectory(std::string id, std::span<const Point> path, double lateral_noise,
                            Rng& rng, double keep_fraction = 1.0);

struct SyntheticDataset {
  TrajectoryDataset dataset;
  /// Planted movement index per trajectory.
  std::vector<int> movement;
};

/// counts[i] trajectories of movements[i], ids "1".."N", in shuffled order.
SyntheticDataset make_intersection(std::span<const Movement> movements,
                                   std::span<const std::size_t> counts, double lateral_noise,
                                   std::uint64_t seed, const IntersectionGeometry& geometry = {});

}  // namespace trajclust
