#pragma once

// Synthetic datasets shared by the unit and acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

#include "trajclust/random.hpp"
#include "trajclust/synthetic.hpp"

namespace scenarios {

using namespace trajclust;

/// Through (E->W) and right-turn (E->N) traffic from the same arm. Half of
/// each movement is cut off before the junction, so the cut halves share
/// the approach lane.
struct SilhouetteTrap {
  TrajectoryDataset dataset;
  std::vector<int> truth;      // 0 = through, 1 = right turn
  std::vector<int> predicted;  // 0 = both cut halves, 1 = full through, 2 = full right turn
  int merged_label = 0;
};

inline SilhouetteTrap silhouette_trap(std::uint64_t seed, std::size_t per_group = 20,
                                      double lateral_noise = 0.5) {
  SilhouetteTrap out;
  out.dataset.site_id = "trap";
  Rng rng(seed);
  const Movement moves[2] = {{0, 2}, {0, 1}};
  int next_id = 1;
  for (int mv = 0; mv < 2; ++mv) {
    const auto path = movement_path(moves[mv]);
    for (int cut = 1; cut >= 0; --cut) {
      for (std::size_t i = 0; i < per_group; ++i) {
        out.dataset.trajectories.push_back(
            noisy_trajectory(std::to_string(next_id++), path, lateral_noise, rng, cut ? 0.5 : 1.0));
        out.truth.push_back(mv);
        out.predicted.push_back(cut ? 0 : 1 + mv);
      }
    }
  }
  return out;
}

/// All eight movements of a four-arm intersection, equal counts.
inline SyntheticDataset eight_movement_intersection(std::size_t per_movement, double lateral_noise,
                                                    std::uint64_t seed) {
  const auto moves = eight_movements();
  const std::vector<std::size_t> counts(moves.size(), per_movement);
  return make_intersection(moves, counts, lateral_noise, seed);
}

}  // namespace scenarios
