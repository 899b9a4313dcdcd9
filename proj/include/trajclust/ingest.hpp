#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "trajclust/core.hpp"

namespace trajclust {

/// A column is addressed either by header name or by zero-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

struct ColumnMapping {
  ColumnRef id_column = std::string("track_id");
  ColumnRef t_column = std::string("t");
  ColumnRef x_column = std::string("x");
  ColumnRef y_column = std::string("y");
  /// Multiplier turning file positions into meters.
  double position_scale = 1.0;
  /// Multiplier turning file timestamps into seconds.
  double time_scale = 1.0;
  char delimiter = ',';
  /// When false the first line is data and every column must be an index.
  bool has_header = true;

  void validate() const;
};

/// Convex polygon in meters. Points on the border count as inside.
class SiteBoundary {
 public:
  explicit SiteBoundary(std::vector<Point> vertices);
  static SiteBoundary rectangle(double x_min, double y_min, double x_max, double y_max);

  bool contains(const Point& p) const;
  double area() const;
  const std::vector<Point>& vertices() const { return vertices_; }

 private:
  std::vector<Point> vertices_;  // counter-clockwise
};

/// Loads observations into trajectories: rows grouped by id, sorted by time,
/// scales applied. Trajectories breaking the core invariants are dropped and
/// reported through `dropped` when given. Throws DataError on unreadable
/// files, missing columns or non-numeric cells.
TrajectoryDataset load_csv(const std::filesystem::path& path, const ColumnMapping& mapping,
                           std::vector<Violation>* dropped = nullptr);

/// Same as load_csv but reading from an in-memory text.
TrajectoryDataset parse_csv(std::string_view text, const ColumnMapping& mapping,
                            std::vector<Violation>* dropped = nullptr,
                            std::string_view source_name = "<memory>");

/// Writes the canonical `track_id,t,x,y` form.
void write_canonical_csv(const std::filesystem::path& path, const TrajectoryDataset& ds);

/// Keeps, for every trajectory, the longest contiguous run of points inside
/// the boundary (earliest run on ties). Runs shorter than two points drop the
/// trajectory.
TrajectoryDataset clip_to_boundary(const TrajectoryDataset& ds, const SiteBoundary& boundary);

/// Parses a boundary JSON document: {"vertices": [[x, y], ...]} or
/// {"rectangle": [x_min, y_min, x_max, y_max]}.
SiteBoundary parse_boundary_json(std::string_view text);
SiteBoundary load_boundary(const std::filesystem::path& path);

}  // namespace trajclust
