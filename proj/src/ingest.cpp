#include "trajclust/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "text_util.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

namespace {

std::string describe(const ColumnRef& ref) {
  if (const auto* name = std::get_if<std::string>(&ref)) return "'" + *name + "'";
  return "#" + std::to_string(std::get<std::size_t>(ref));
}

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string_view>& header,
                    std::string_view source) {
  if (const auto* index = std::get_if<std::size_t>(&ref)) {
    if (!header.empty() && *index >= header.size()) {
      throw DataError(std::string(source) + ": missing column " + describe(ref));
    }
    return *index;
  }
  const auto& name = std::get<std::string>(ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw DataError(std::string(source) + ": missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

// Integer-looking ids compare numerically so "2" precedes "10".
bool id_less(const std::string& a, const std::string& b) {
  const auto ia = detail::parse_int(a);
  const auto ib = detail::parse_int(b);
  if (ia && ib && *ia != *ib) return *ia < *ib;
  if (ia.has_value() != ib.has_value()) return ia.has_value();
  return a < b;
}

struct IdLess {
  bool operator()(const std::string& a, const std::string& b) const { return id_less(a, b); }
};

}  // namespace

void ColumnMapping::validate() const {
  const std::vector<const ColumnRef*> cols{&id_column, &t_column, &x_column, &y_column};
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      if (*cols[i] == *cols[j]) {
        throw ConfigError("column mapping uses " + describe(*cols[i]) + " twice");
      }
    }
    if (!has_header && std::holds_alternative<std::string>(*cols[i])) {
      throw ConfigError("headerless input needs column indices, got " + describe(*cols[i]));
    }
  }
  if (!(position_scale > 0.0) || !(time_scale > 0.0)) {
    throw ConfigError("scale factors must be positive");
  }
}

TrajectoryDataset parse_csv(std::string_view text, const ColumnMapping& mapping,
                            std::vector<Violation>* dropped, std::string_view source_name) {
  mapping.validate();

  std::vector<std::string_view> header;
  std::array<std::size_t, 4> cols{};  // id, t, x, y
  std::map<std::string, std::vector<Point>, IdLess> groups;
  bool header_done = !mapping.has_header;
  if (header_done) {
    cols = {std::get<std::size_t>(mapping.id_column), std::get<std::size_t>(mapping.t_column),
            std::get<std::size_t>(mapping.x_column), std::get<std::size_t>(mapping.y_column)};
  }
  const auto width = [&] { return *std::max_element(cols.begin(), cols.end()) + 1; };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (detail::trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto cells = detail::split(line, mapping.delimiter);
    if (!header_done) {
      header = cells;
      cols = {resolve(mapping.id_column, header, source_name),
              resolve(mapping.t_column, header, source_name),
              resolve(mapping.x_column, header, source_name),
              resolve(mapping.y_column, header, source_name)};
      header_done = true;
      continue;
    }
    const auto where = std::string(source_name) + ": row " + std::to_string(line_no);
    if (cells.size() < width()) {
      throw DataError(where + ": expected at least " + std::to_string(width()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    const auto number = [&](std::size_t col, std::string_view what) {
      const auto v = detail::parse_double(cells[col]);
      if (!v) {
        throw DataError(where + ": non-numeric " + std::string(what) + " '" +
                        std::string(cells[col]) + "'");
      }
      return *v;
    };
    Point p;
    p.t = number(cols[1], "t") * mapping.time_scale;
    p.x = number(cols[2], "x") * mapping.position_scale;
    p.y = number(cols[3], "y") * mapping.position_scale;
    groups[std::string(cells[cols[0]])].push_back(p);
    if (end == text.size()) break;
  }
  if (!header_done) throw DataError(std::string(source_name) + ": empty file");

  TrajectoryDataset ds;
  ds.site_id = std::filesystem::path(std::string(source_name)).stem().string();
  for (auto& [id, points] : groups) {
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
      return std::tie(a.t, a.x, a.y) < std::tie(b.t, b.x, b.y);
    });
    Trajectory traj{id, std::move(points)};
    auto problems = validate_trajectory(traj);
    if (!problems.empty()) {
      if (dropped) dropped->insert(dropped->end(), problems.begin(), problems.end());
      continue;
    }
    ds.trajectories.push_back(std::move(traj));
  }
  return ds;
}

TrajectoryDataset load_csv(const std::filesystem::path& path, const ColumnMapping& mapping,
                           std::vector<Violation>* dropped) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), mapping, dropped, path.string());
}

void write_canonical_csv(const std::filesystem::path& path, const TrajectoryDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "track_id,t,x,y\n";
  for (const auto& traj : ds.trajectories) {
    for (const auto& p : traj.points) {
      out << traj.id << ',' << detail::exact_number(p.t) << ',' << detail::exact_number(p.x)
          << ',' << detail::exact_number(p.y) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

double signed_area(const std::vector<Point>& v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return twice / 2.0;
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

SiteBoundary::SiteBoundary(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw ConfigError("boundary needs at least 3 vertices");
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ConfigError("boundary vertices must be finite");
    }
  }
  const double a = signed_area(vertices_);
  if (!(std::abs(a) > 0.0)) throw ConfigError("boundary has zero area");
  if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  const auto n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]) < 0.0) {
      throw ConfigError("boundary polygon must be convex");
    }
  }
}

SiteBoundary SiteBoundary::rectangle(double x_min, double y_min, double x_max, double y_max) {
  return SiteBoundary(
      {{x_min, y_min, 0}, {x_max, y_min, 0}, {x_max, y_max, 0}, {x_min, y_max, 0}});
}

bool SiteBoundary::contains(const Point& p) const {
  const auto n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(vertices_[i], vertices_[(i + 1) % n], p) < 0.0) return false;
  }
  return true;
}

double SiteBoundary::area() const { return signed_area(vertices_); }

TrajectoryDataset clip_to_boundary(const TrajectoryDataset& ds, const SiteBoundary& boundary) {
  TrajectoryDataset out;
  out.site_id = ds.site_id;
  for (const auto& traj : ds.trajectories) {
    std::size_t best_start = 0, best_len = 0;
    std::size_t run_start = 0, run_len = 0;
    for (std::size_t j = 0; j < traj.size(); ++j) {
      if (boundary.contains(traj.points[j])) {
        if (run_len == 0) run_start = j;
        ++run_len;
        if (run_len > best_len) {
          best_len = run_len;
          best_start = run_start;
        }
      } else {
        run_len = 0;
      }
    }
    if (best_len < kMinTrajectoryLength) continue;
    Trajectory clipped{traj.id, {}};
    clipped.points.assign(traj.points.begin() + static_cast<std::ptrdiff_t>(best_start),
                          traj.points.begin() + static_cast<std::ptrdiff_t>(best_start + best_len));
    out.trajectories.push_back(std::move(clipped));
  }
  return out;
}

SiteBoundary parse_boundary_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("boundary: ") + e.what());
  }
  try {
    if (doc.contains("rectangle")) {
      const auto r = doc.at("rectangle").get<std::vector<double>>();
      if (r.size() != 4) throw ConfigError("boundary rectangle needs 4 numbers");
      return SiteBoundary::rectangle(r[0], r[1], r[2], r[3]);
    }
    std::vector<Point> vertices;
    for (const auto& v : doc.at("vertices")) {
      const auto xy = v.get<std::vector<double>>();
      if (xy.size() != 2) throw ConfigError("boundary vertex needs 2 coordinates");
      vertices.push_back({xy[0], xy[1], 0.0});
    }
    return SiteBoundary(std::move(vertices));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("boundary: ") + e.what());
  }
}

SiteBoundary load_boundary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read boundary '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_boundary_json(buf.str());
}

}  // namespace trajclust
