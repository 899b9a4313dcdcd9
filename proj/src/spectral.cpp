#include <algorithm>
#include <cmath>
#include <limits>

#include "cluster_internal.hpp"
#include "trajclust/cluster.hpp"
#include "trajclust/error.hpp"
#include "trajclust/random.hpp"

namespace trajclust {

namespace {

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

}  // namespace

SpectralEmbedding::SpectralEmbedding(const PairwiseMatrix& m) {
  const auto n = m.size();
  std::vector<double> off;
  off.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) off.push_back(m(i, j));
  }
  std::vector<double> positive;
  std::copy_if(off.begin(), off.end(), std::back_inserter(positive), [](double d) { return d > 0; });
  if (positive.empty()) {
    throw DataError("spectral: degenerate affinity, all pairwise distances are zero");
  }
  sigma_ = median(off);
  // More than half the pairs coincide: use the typical nonzero scale.
  if (sigma_ == 0.0) sigma_ = median(positive);

  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd affinity(dim, dim);
  const double denom = 2.0 * sigma_ * sigma_;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double d = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      affinity(i, j) = std::exp(-d * d / denom);
    }
  }
  // Self-affinity 1 keeps every degree >= 1.
  const Eigen::VectorXd inv_sqrt_degree = affinity.rowwise().sum().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd laplacian =
      -(inv_sqrt_degree.asDiagonal() * affinity * inv_sqrt_degree.asDiagonal());
  laplacian.diagonal().array() += 1.0;
  // Exact symmetry so the solver result does not depend on rounding asymmetry.
  laplacian = (0.5 * (laplacian + laplacian.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) throw DataError("spectral: eigen-decomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

ClusterAssignment SpectralEmbedding::cluster(std::size_t k, std::uint64_t seed) const {
  detail::check_cluster_count(k, size(), "spectral");
  Eigen::MatrixXd embedding = eigenvectors_.leftCols(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return kmeans(embedding, k, seed);
}

ClusterAssignment spectral(const PairwiseMatrix& m, std::size_t k, std::uint64_t seed) {
  detail::check_cluster_count(k, m.size(), "spectral");
  return SpectralEmbedding(m).cluster(k, seed);
}

// ---------------------------------------------------------------------------

namespace {

struct KMeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KMeansRun lloyd(const Eigen::MatrixXd& x, std::size_t k, Rng& rng, std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto row = [&](std::size_t i) { return x.row(static_cast<Eigen::Index>(i)); };

  // k-means++ seeding.
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), x.cols());
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(uniform_below(rng, n));
  chosen[first] = true;
  centers.row(0) = row(first);
  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = (row(i) - centers.row(0)).squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i]) total += closest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        acc += closest[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      auto nth = uniform_below(rng, n - c);
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i] && nth-- == 0) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
    centers.row(static_cast<Eigen::Index>(c)) = row(pick);
    for (std::size_t i = 0; i < n; ++i) {
      closest[i] = std::min(closest[i], (row(i) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm());
    }
  }

  KMeansRun run;
  run.labels.assign(n, -1);
  std::vector<double> dist(n);
  for (std::size_t iter = 0; iter <= max_iterations; ++iter) {
    bool changed = false;
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = (row(i) - centers.row(0)).squaredNorm();
      for (std::size_t c = 1; c < k; ++c) {
        const double d = (row(i) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist[i] = best_d;
      if (run.labels[i] != static_cast<int>(best)) changed = true;
      run.labels[i] = static_cast<int>(best);
      ++sizes[best];
    }
    // Empty clusters take the point farthest from its center.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(run.labels[i])] > 1 && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      --sizes[static_cast<std::size_t>(run.labels[far])];
      run.labels[far] = static_cast<int>(c);
      dist[far] = 0.0;
      sizes[c] = 1;
      changed = true;
    }
    centers.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      centers.row(run.labels[i]) += row(i);
    }
    for (std::size_t c = 0; c < k; ++c) {
      centers.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
    }
    if (!changed) break;
  }
  run.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run.inertia += (row(i) - centers.row(run.labels[i])).squaredNorm();
  }
  return run;
}

}  // namespace

ClusterAssignment kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                         std::size_t restarts, std::size_t max_iterations) {
  detail::check_cluster_count(k, static_cast<std::size_t>(points.rows()), "k-means");
  KMeansRun best;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    Rng rng(derive_seed(seed, {r}));
    auto run = lloyd(points, k, rng, max_iterations);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return canonical_labels({std::move(best.labels)});
}

}  // namespace trajclust
