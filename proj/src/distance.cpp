#include "trajclust/distance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "text_util.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool within(const Point& p, const Point& q, double radius) { return euclidean(p, q) <= radius; }

}  // namespace

double dtw(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) return kNaN;
  const auto m = b.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double best = std::min({prev[j - 1], prev[j], cur[j - 1]});
      cur[j] = euclidean(a[i - 1], b[j - 1]) + best;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::size_t lcss_length(std::span<const Point> a, std::span<const Point> b, double radius) {
  const auto m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = within(a[i - 1], b[j - 1], radius) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double lcss_distance(std::span<const Point> a, std::span<const Point> b, double radius) {
  if (a.empty() || b.empty()) return kNaN;
  const auto shorter = std::min(a.size(), b.size());
  return 1.0 - static_cast<double>(lcss_length(a, b, radius)) / static_cast<double>(shorter);
}

std::size_t edr(std::span<const Point> a, std::span<const Point> b, double radius) {
  const auto m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t substitute = prev[j - 1] + (within(a[i - 1], b[j - 1], radius) ? 0 : 1);
      cur[j] = std::min({substitute, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

namespace {

double progress(std::size_t i, std::size_t m) {
  return m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.0;
}

double directed_pf(std::span<const Point> a, std::span<const Point> b, double window) {
  // Absorbs rounding in i/(m-1) so that e.g. |0.3 - 0.2| <= 0.1 holds.
  constexpr double slack = 1e-12;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = progress(i, a.size());
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    double nearest_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double gap = std::abs(progress(j, b.size()) - u);
      if (gap <= window + slack) best = std::min(best, euclidean(a[i], b[j]));
      if (gap < nearest_gap) {
        nearest_gap = gap;
        nearest = j;
      }
    }
    if (!std::isfinite(best)) best = euclidean(a[i], b[nearest]);
    total += best;
  }
  return total / static_cast<double>(a.size());
}

}  // namespace

double pf(std::span<const Point> a, std::span<const Point> b, double window) {
  if (a.empty() || b.empty()) return kNaN;
  return (directed_pf(a, b, window) + directed_pf(b, a, window)) / 2.0;
}

namespace {

double directed_hausdorff(std::span<const Point> a, std::span<const Point> b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) best = std::min(best, euclidean(p, q));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) return kNaN;
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double point_segment_distance(const Point& p, const Point& s0, const Point& s1) {
  const double dx = s1.x - s0.x;
  const double dy = s1.y - s0.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return euclidean(p, s0);
  const double t = std::clamp(((p.x - s0.x) * dx + (p.y - s0.y) * dy) / len2, 0.0, 1.0);
  // The endpoint terms make the result exact when p is a vertex.
  return std::min({std::hypot(p.x - (s0.x + t * dx), p.y - (s0.y + t * dy)), euclidean(p, s0),
                   euclidean(p, s1)});
}

double spd(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) return kNaN;
  double total = 0.0;
  for (const auto& p : a) {
    double best = b.size() == 1 ? euclidean(p, b[0]) : std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      best = std::min(best, point_segment_distance(p, b[j], b[j + 1]));
    }
    total += best;
  }
  return total / static_cast<double>(a.size());
}

double sspd(std::span<const Point> a, std::span<const Point> b) {
  return (spd(a, b) + spd(b, a)) / 2.0;
}

double distance(const Trajectory& a, const Trajectory& b, const DistanceSpec& spec) {
  const std::span<const Point> pa = a.points;
  const std::span<const Point> pb = b.points;
  switch (spec.kind) {
    case DistanceKind::DTW: return dtw(pa, pb);
    case DistanceKind::LCSS: return lcss_distance(pa, pb, *spec.radius);
    case DistanceKind::EDR: {
      if (pa.empty() || pb.empty()) return kNaN;
      const auto raw = static_cast<double>(edr(pa, pb, *spec.radius));
      return spec.normalize_edr ? raw / static_cast<double>(std::max(pa.size(), pb.size())) : raw;
    }
    case DistanceKind::PF: return pf(pa, pb, *spec.window);
    case DistanceKind::Hausdorff: return hausdorff(pa, pb);
    case DistanceKind::SSPD: return sspd(pa, pb);
  }
  return kNaN;
}

// ---------------------------------------------------------------------------

PairwiseMatrix::PairwiseMatrix(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (values_.size() != n_ * n_) {
    throw DataError("matrix of order " + std::to_string(n_) + " needs " +
                    std::to_string(n_ * n_) + " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (values_[i * n_ + i] != 0.0) {
      throw DataError("matrix diagonal entry " + std::to_string(i) + " is not zero");
    }
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double v = values_[i * n_ + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw DataError("matrix entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") is not a finite nonnegative number");
      }
      if (values_[j * n_ + i] != v) {
        throw DataError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      }
    }
  }
}

PairwiseMatrix PairwiseMatrix::reordered(std::span<const std::size_t> order) const {
  const auto m = order.size();
  std::vector<double> out(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = (*this)(order[i], order[j]);
  }
  PairwiseMatrix result;
  result.n_ = m;
  result.values_ = std::move(out);
  return result;
}

PairwiseMatrix point_distance_matrix(std::span<const Point> points) {
  const auto n = points.size();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      values[i * n + j] = values[j * n + i] = euclidean(points[i], points[j]);
    }
  }
  return PairwiseMatrix(n, std::move(values));
}

std::uint64_t dataset_fingerprint(const TrajectoryDataset& ds) {
  // FNV-1a over ids and point counts; stable across platforms and runs.
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  for (const auto& traj : ds.trajectories) {
    for (unsigned char c : traj.id) mix(c);
    mix(0);
    auto count = static_cast<std::uint64_t>(traj.size());
    for (int k = 0; k < 8; ++k) mix(static_cast<unsigned char>(count >> (8 * k)));
  }
  return h;
}

DistanceMatrix::DistanceMatrix(PairwiseMatrix values, DistanceSpec spec, std::uint64_t fingerprint)
    : PairwiseMatrix(std::move(values)), spec_(std::move(spec)), fingerprint_(fingerprint) {}

DistanceMatrix DistanceMatrix::restricted(std::span<const std::size_t> indices,
                                          const TrajectoryDataset& subset) const {
  return DistanceMatrix(reordered(indices), spec_, dataset_fingerprint(subset));
}

DistanceMatrix build_matrix(const TrajectoryDataset& ds, const DistanceSpec& spec,
                            unsigned workers) {
  spec.validate();
  if (ds.empty()) throw DataError("cannot build a distance matrix over an empty dataset");
  const auto n = ds.size();
  std::vector<double> values(n * n, 0.0);
  // Lowest failing column per row; rows are claimed dynamically but every
  // entry has a fixed destination, so the result is independent of scheduling.
  std::vector<std::optional<std::size_t>> failure(n);
  std::atomic<std::size_t> next_row{0};
  const auto work = [&] {
    for (std::size_t i = next_row++; i < n; i = next_row++) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = distance(ds[i], ds[j], spec);
        if (!std::isfinite(d) || d < 0.0) {
          if (!failure[i]) failure[i] = j;
          continue;
        }
        values[i * n + j] = values[j * n + i] = d;
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (failure[i]) {
      throw DataError(spec.id() + " is not finite for pair ('" + ds[i].id + "', '" +
                      ds[*failure[i]].id + "')");
    }
  }
  return DistanceMatrix(PairwiseMatrix(n, std::move(values)), spec, dataset_fingerprint(ds));
}

}  // namespace trajclust
