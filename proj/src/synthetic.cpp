#include "trajclust/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trajclust/error.hpp"

namespace trajclust {

namespace {

struct Vec {
  double x, y;
};
Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }

Vec arm_axis(int arm) {
  const double angle = arm * std::numbers::pi / 2.0;
  // Exact zeros keep the geometry symmetric.
  const auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
  return {snap(std::cos(angle)), snap(std::sin(angle))};
}

}  // namespace

std::vector<Movement> eight_movements() {
  std::vector<Movement> out;
  for (int a = 0; a < 4; ++a) {
    out.push_back({a, (a + 2) % 4});
    out.push_back({a, (a + 1) % 4});
  }
  return out;
}

std::vector<Point> movement_path(const Movement& mv, const IntersectionGeometry& g) {
  if (mv.from_arm < 0 || mv.from_arm > 3 || mv.to_arm < 0 || mv.to_arm > 3) {
    throw ConfigError("movement arms must lie in 0..3");
  }
  if (mv.from_arm == mv.to_arm) throw ConfigError("U-turns are not modeled");
  if (!(g.arm_length > g.junction_radius && g.junction_radius > 0 && g.spacing > 0 && g.speed > 0)) {
    throw ConfigError("invalid intersection geometry");
  }
  const Vec ua = arm_axis(mv.from_arm);
  const Vec ub = arm_axis(mv.to_arm);
  const Vec in_off = g.lane_offset * Vec{-ua.y, ua.x};
  const Vec out_off = g.lane_offset * Vec{ub.y, -ub.x};
  const Vec start = g.arm_length * ua + in_off;
  const Vec entry = g.junction_radius * ua + in_off;
  const Vec exit = g.junction_radius * ub + out_off;
  const Vec end = g.arm_length * ub + out_off;

  std::vector<Vec> dense{start};
  const double c = 0.55 * g.junction_radius;
  const Vec c1 = entry - c * ua;
  const Vec c2 = exit - c * ub;
  constexpr int steps = 400;
  for (int i = 0; i <= steps; ++i) {
    const double s = static_cast<double>(i) / steps;
    const double r = 1.0 - s;
    dense.push_back(r * r * r * entry + 3.0 * r * r * s * c1 + 3.0 * r * s * s * c2 + s * s * s * exit);
  }
  dense.push_back(end);

  std::vector<double> arc(dense.size(), 0.0);
  for (std::size_t i = 1; i < dense.size(); ++i) {
    arc[i] = arc[i - 1] + std::hypot(dense[i].x - dense[i - 1].x, dense[i].y - dense[i - 1].y);
  }
  const double total = arc.back();
  const auto m = static_cast<std::size_t>(std::max(1.0, std::round(total / g.spacing))) + 1;
  std::vector<Point> out;
  out.reserve(m);
  std::size_t seg = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(m - 1);
    while (seg + 1 < dense.size() && arc[seg] < s) ++seg;
    const double len = arc[seg] - arc[seg - 1];
    const double f = len > 0 ? std::clamp((s - arc[seg - 1]) / len, 0.0, 1.0) : 0.0;
    const Vec p = dense[seg - 1] + f * (dense[seg] - dense[seg - 1]);
    out.push_back({p.x, p.y, s / g.speed});
  }
  out.front() = {start.x, start.y, 0.0};
  out.back() = {end.x, end.y, total / g.speed};
  return out;
}

Trajectory noisy_trajectory(std::string id, std::span<const Point> path, double lateral_noise,
                            Rng& rng, double keep_fraction) {
  if (path.size() < 2) throw ConfigError("path needs at least 2 points");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) throw ConfigError("keep_fraction must lie in (0, 1]");
  const auto keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::round(keep_fraction * static_cast<double>(path.size()))), 2,
      path.size());
  Trajectory t{std::move(id), {}};
  t.points.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const auto& prev = path[i == 0 ? 0 : i - 1];
    const auto& next = path[std::min(i + 1, path.size() - 1)];
    double tx = next.x - prev.x, ty = next.y - prev.y;
    const double len = std::hypot(tx, ty);
    tx /= len;
    ty /= len;
    const double shift = lateral_noise * standard_normal(rng);
    t.points.push_back({path[i].x - ty * shift, path[i].y + tx * shift, path[i].t});
  }
  return t;
}

SyntheticDataset make_intersection(std::span<const Movement> movements,
                                   std::span<const std::size_t> counts, double lateral_noise,
                                   std::uint64_t seed, const IntersectionGeometry& geometry) {
  if (movements.size() != counts.size()) throw ConfigError("one count per movement required");
  Rng rng(derive_seed(seed, {0}));
  std::vector<Trajectory> trajs;
  std::vector<int> labels;
  for (std::size_t m = 0; m < movements.size(); ++m) {
    const auto path = movement_path(movements[m], geometry);
    for (std::size_t c = 0; c < counts[m]; ++c) {
      trajs.push_back(noisy_trajectory("", path, lateral_noise, rng));
      labels.push_back(static_cast<int>(m));
    }
  }
  const auto order = random_permutation(trajs.size(), derive_seed(seed, {1}));
  SyntheticDataset out;
  out.dataset.site_id = "synthetic";
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto t = std::move(trajs[order[i]]);
    t.id = std::to_string(i + 1);
    out.dataset.trajectories.push_back(std::move(t));
    out.movement.push_back(labels[order[i]]);
  }
  return out;
}

}  // namespace trajclust
