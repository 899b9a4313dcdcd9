#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "trajclust/bench.hpp"
#include "trajclust/cluster.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/error.hpp"
#include "trajclust/ingest.hpp"
#include "trajclust/metrics.hpp"
#include "trajclust/reference.hpp"
#include "trajclust/synthetic.hpp"

namespace py = pybind11;
using namespace trajclust;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<int, py::array::c_style | py::array::forcecast>;

// Rows of (x, y) or (x, y, t). Without a time column the row index is used.
std::vector<Point> to_points(const Array& a) {
  if (a.ndim() != 2 || (a.shape(1) != 2 && a.shape(1) != 3)) {
    throw py::value_error("trajectory must be an (n, 2) or (n, 3) array");
  }
  const auto r = a.unchecked<2>();
  std::vector<Point> pts(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    pts[i] = {r(i, 0), r(i, 1), a.shape(1) == 3 ? r(i, 2) : static_cast<double>(i)};
  }
  return pts;
}

Array to_array(const std::vector<Point>& pts) {
  Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w(i, 0) = pts[i].x;
    w(i, 1) = pts[i].y;
    w(i, 2) = pts[i].t;
  }
  return out;
}

PairwiseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
    throw py::value_error("distance matrix must be square");
  }
  const auto n = static_cast<std::size_t>(a.shape(0));
  return PairwiseMatrix(n, std::vector<double>(a.data(), a.data() + n * n));
}

Array matrix_array(const PairwiseMatrix& m) {
  const auto n = static_cast<py::ssize_t>(m.size());
  Array out({n, n});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

std::vector<int> to_labels(const Labels& a) {
  if (a.ndim() != 1) throw py::value_error("labels must be one-dimensional");
  return {a.data(), a.data() + a.shape(0)};
}

Labels labels_array(const ClusterAssignment& a) {
  Labels out(static_cast<py::ssize_t>(a.size()));
  std::copy(a.labels.begin(), a.labels.end(), out.mutable_data());
  return out;
}

// Accepts a DistanceMatrix or a square array.
PairwiseMatrix as_matrix(const py::object& obj) {
  if (py::isinstance<DistanceMatrix>(obj)) return obj.cast<const DistanceMatrix&>();
  return to_matrix(obj.cast<Array>());
}

using Metric = double (*)(const ContingencyTable&);

double score(Metric f, const Labels& reference, const Labels& predicted) {
  const auto r = to_labels(reference);
  const auto p = to_labels(predicted);
  if (r.size() != p.size()) throw py::value_error("label arrays differ in length");
  return f(ContingencyTable(r, p));
}

py::dict report_dict(const BenchmarkReport& report) {
  py::list retained;
  for (auto m : report.retained) retained.append(std::string(to_string(m)));

  py::list records;
  for (const auto& r : report.result.records) {
    py::dict d;
    d["setup_id"] = r.setup.id();
    d["measure"] = std::string(to_string(r.measure));
    d["values"] = r.values;
    d["mean"] = r.mean;
    d["stddev"] = r.stddev;
    d["lower"] = r.lower;
    d["noise_fraction"] = r.noise_fraction;
    records.append(std::move(d));
  }

  py::list ranking;
  for (auto s : report.ranks.order) {
    py::dict d;
    d["setup_id"] = report.ranks.setups[s].id();
    d["average_rank"] = report.ranks.average_rank[s];
    py::dict per;
    for (auto m : report.retained) per[py::str(std::string(to_string(m)))] = report.ranks.ranks[s][index_of(m)];
    d["ranks"] = std::move(per);
    ranking.append(std::move(d));
  }

  py::list failures;
  for (const auto& f : report.result.failures) {
    failures.append(py::make_tuple(f.setup_id, f.permutation, f.message));
  }

  py::dict out;
  out["permutations"] = report.result.permutations;
  out["retained"] = std::move(retained);
  out["records"] = std::move(records);
  out["ranking"] = std::move(ranking);
  out["top"] = report.ranks.top.size();
  out["distance_frequencies"] = report.frequencies.distance;
  out["algorithm_frequencies"] = report.frequencies.algorithm;
  out["failures"] = std::move(failures);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trajectory clustering evaluation toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  auto data_error = py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<CacheMismatchError>(m, "CacheMismatchError", data_error.ptr());

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init([](std::string id, const Array& points) { return Trajectory{std::move(id), to_points(points)}; }),
           py::arg("id"), py::arg("points"))
      .def_readwrite("id", &Trajectory::id)
      .def_property_readonly("points", [](const Trajectory& t) { return to_array(t.points); })
      .def("__len__", &Trajectory::size)
      .def("__repr__", [](const Trajectory& t) {
        return "<Trajectory " + t.id + " with " + std::to_string(t.size()) + " points>";
      });

  py::class_<TrajectoryDataset>(m, "TrajectoryDataset")
      .def(py::init([](std::vector<Trajectory> ts, std::string site) {
             return TrajectoryDataset{std::move(ts), std::move(site)};
           }),
           py::arg("trajectories"), py::arg("site_id") = "")
      .def_readonly("trajectories", &TrajectoryDataset::trajectories)
      .def_readwrite("site_id", &TrajectoryDataset::site_id)
      .def("__len__", &TrajectoryDataset::size)
      .def("__getitem__", [](const TrajectoryDataset& ds, std::size_t i) {
        if (i >= ds.size()) throw py::index_error();
        return ds[i];
      })
      .def("save_csv", [](const TrajectoryDataset& ds, const std::filesystem::path& p) { write_canonical_csv(p, ds); });

  py::class_<DistanceSpec>(m, "DistanceSpec")
      .def_static("dtw", &DistanceSpec::dtw)
      .def_static("lcss", &DistanceSpec::lcss, py::arg("r_b"))
      .def_static("edr", &DistanceSpec::edr, py::arg("r_b"), py::arg("normalized") = false)
      .def_static("pf", &DistanceSpec::pf, py::arg("w"))
      .def_static("hausdorff", &DistanceSpec::hausdorff)
      .def_static("sspd", &DistanceSpec::sspd)
      .def_property_readonly("id", &DistanceSpec::id)
      .def("__repr__", &DistanceSpec::id)
      .def(py::self == py::self);

  py::enum_<Linkage>(m, "Linkage")
      .value("complete", Linkage::Complete)
      .value("average", Linkage::Average)
      .value("single", Linkage::Single);

  py::class_<AlgorithmSpec>(m, "AlgorithmSpec")
      .def_static("kmedoids", &AlgorithmSpec::kmedoids, py::arg("seed") = 0)
      .def_static("agglomerative", &AlgorithmSpec::agglomerative, py::arg("linkage"))
      .def_static("spectral", &AlgorithmSpec::spectral, py::arg("seed") = 0)
      .def_static("dbscan", &AlgorithmSpec::dbscan, py::arg("d_z"), py::arg("n_z_min"))
      .def_static("optics", &AlgorithmSpec::optics, py::arg("n_z_min"))
      .def_property_readonly("id", &AlgorithmSpec::id)
      .def("__repr__", &AlgorithmSpec::id)
      .def(py::self == py::self);

  py::class_<ClusteringSetup>(m, "Setup")
      .def(py::init([](DistanceSpec d, AlgorithmSpec a, std::optional<std::size_t> k) {
             ClusteringSetup s{d, a, k};
             s.validate();
             return s;
           }),
           py::arg("distance"), py::arg("algorithm"), py::arg("k") = py::none())
      .def_property_readonly("id", &ClusteringSetup::id)
      .def("__repr__", &ClusteringSetup::id);

  py::class_<DistanceMatrix>(m, "DistanceMatrix")
      .def_property_readonly("spec", &DistanceMatrix::spec)
      .def_property_readonly("fingerprint", &DistanceMatrix::fingerprint)
      .def("__len__", &DistanceMatrix::size)
      .def("__call__", [](const DistanceMatrix& d, std::size_t i, std::size_t j) {
        if (i >= d.size() || j >= d.size()) throw py::index_error();
        return d(i, j);
      })
      .def("to_numpy", [](const DistanceMatrix& d) { return matrix_array(d); })
      .def("save", [](const DistanceMatrix& d, const std::filesystem::path& p) { save_matrix(p, d); })
      .def_static("load", py::overload_cast<const std::filesystem::path&>(&load_matrix));

  py::class_<ReferenceClusters>(m, "ReferenceClusters")
      .def_readonly("k_origin", &ReferenceClusters::k_origin)
      .def_readonly("k_destination", &ReferenceClusters::k_destination)
      .def_readonly("epsilon", &ReferenceClusters::epsilon)
      .def_readonly("cluster_count", &ReferenceClusters::cluster_count)
      .def_property_readonly("retained_indices", &ReferenceClusters::retained_indices)
      .def_property_readonly("retained_labels", &ReferenceClusters::retained_labels)
      .def_property_readonly("od_labels", [](const ReferenceClusters& r) {
        std::vector<int> out;
        for (const auto& e : r.entries) out.push_back(e.od_label);
        return out;
      })
      .def("save_csv", [](const ReferenceClusters& r, const std::filesystem::path& p) { write_reference_csv(p, r); });

  m.def("dtw", [](const Array& a, const Array& b) { return dtw(to_points(a), to_points(b)); });
  m.def("lcss_distance", [](const Array& a, const Array& b, double r) { return lcss_distance(to_points(a), to_points(b), r); },
        py::arg("a"), py::arg("b"), py::arg("r_b"));
  m.def("edr", [](const Array& a, const Array& b, double r) { return edr(to_points(a), to_points(b), r); },
        py::arg("a"), py::arg("b"), py::arg("r_b"));
  m.def("pf", [](const Array& a, const Array& b, double w) { return pf(to_points(a), to_points(b), w); },
        py::arg("a"), py::arg("b"), py::arg("w"));
  m.def("hausdorff", [](const Array& a, const Array& b) { return hausdorff(to_points(a), to_points(b)); });
  m.def("sspd", [](const Array& a, const Array& b) { return sspd(to_points(a), to_points(b)); });

  m.def("load_csv", [](const std::filesystem::path& p) { return load_csv(p, ColumnMapping{}); }, py::arg("path"));
  m.def("parse_csv", [](const std::string& text) { return parse_csv(text, ColumnMapping{}); }, py::arg("text"));
  m.def("make_intersection",
        [](std::vector<std::pair<int, int>> movements, std::size_t per_movement, double noise, std::uint64_t seed) {
          std::vector<Movement> mv;
          for (auto [from, to] : movements) mv.push_back({from, to});
          auto syn = make_intersection(mv, std::vector<std::size_t>(mv.size(), per_movement), noise, seed);
          return py::make_tuple(std::move(syn.dataset), std::move(syn.movement));
        },
        py::arg("movements"), py::arg("per_movement"), py::arg("lateral_noise") = 0.5, py::arg("seed") = 0,
        "Synthetic intersection; returns (dataset, movement index per trajectory).");

  m.def("build_matrix", &build_matrix, py::arg("dataset"), py::arg("spec"), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());

  m.def("kmedoids", [](const py::object& d, std::size_t k, std::uint64_t seed) { return labels_array(kmedoids(as_matrix(d), k, seed)); },
        py::arg("matrix"), py::arg("k"), py::arg("seed") = 0);
  m.def("agglomerative",
        [](const py::object& d, std::size_t k, Linkage l) { return labels_array(agglomerative(as_matrix(d), k, l)); },
        py::arg("matrix"), py::arg("k"), py::arg("linkage") = Linkage::Average);
  m.def("spectral", [](const py::object& d, std::size_t k, std::uint64_t seed) { return labels_array(spectral(as_matrix(d), k, seed)); },
        py::arg("matrix"), py::arg("k"), py::arg("seed") = 0);
  m.def("dbscan",
        [](const py::object& d, double r, std::size_t n) { return labels_array(dbscan(as_matrix(d), r, n)); },
        py::arg("matrix"), py::arg("d_z"), py::arg("n_z_min"));
  m.def("optics", [](const py::object& d, std::size_t n) { return labels_array(optics(as_matrix(d), n)); },
        py::arg("matrix"), py::arg("n_z_min"));
  m.def("run_algorithm",
        [](const py::object& d, const AlgorithmSpec& spec, std::optional<std::size_t> k) {
          return labels_array(run_algorithm(as_matrix(d), spec, k));
        },
        py::arg("matrix"), py::arg("algorithm"), py::arg("k") = py::none());

  m.def("silhouette",
        [](const py::object& d, const Labels& labels) { return silhouette(as_matrix(d), ClusterAssignment{to_labels(labels)}); },
        py::arg("matrix"), py::arg("labels"));
  m.def("ari", [](const Labels& r, const Labels& p) { return score(&ari, r, p); }, py::arg("reference"), py::arg("predicted"));
  m.def("ami", [](const Labels& r, const Labels& p) { return score(&ami, r, p); }, py::arg("reference"), py::arg("predicted"));
  m.def("fmi", [](const Labels& r, const Labels& p) { return score(&fmi, r, p); }, py::arg("reference"), py::arg("predicted"));
  m.def("homogeneity_completeness_v",
        [](const Labels& reference, const Labels& predicted, double beta) {
          const auto r = to_labels(reference);
          const auto p = to_labels(predicted);
          if (r.size() != p.size()) throw py::value_error("label arrays differ in length");
          const auto hcv = homogeneity_completeness_v(ContingencyTable(r, p), beta);
          return py::make_tuple(hcv.homogeneity, hcv.completeness, hcv.v_measure);
        },
        py::arg("reference"), py::arg("predicted"), py::arg("beta") = kDefaultBeta);

  m.def("build_reference",
        [](const TrajectoryDataset& ds, std::optional<std::size_t> k_origin, std::optional<std::size_t> k_destination,
           double epsilon, std::size_t k_min, std::size_t k_max) {
          std::vector<Point> origins, destinations;
          for (const auto& t : ds.trajectories) {
            origins.push_back(origin(t));
            destinations.push_back(destination(t));
          }
          auto pick = [&](const std::vector<Point>& pts, std::optional<std::size_t> k) {
            if (k) return *k;
            return pick_elbow(endpoint_elbow(pts, k_min, std::min(k_max, pts.size() + 1)));
          };
          return build_reference(ds, pick(origins, k_origin), pick(destinations, k_destination),
                                 default_endpoint_algorithm(), epsilon);
        },
        py::arg("dataset"), py::arg("k_origin") = py::none(), py::arg("k_destination") = py::none(),
        py::arg("epsilon") = kDefaultOdThreshold, py::arg("k_min") = 2, py::arg("k_max") = 16,
        "Reference clusters from endpoint clustering; k is picked by the elbow rule when not given.");

  m.def("benchmark",
        [](const TrajectoryDataset& ds, const ReferenceClusters& ref, std::optional<std::vector<DistanceSpec>> distances,
           std::optional<std::vector<AlgorithmSpec>> algorithms, std::size_t k_min, std::size_t k_max,
           std::size_t permutations, std::uint64_t seed, unsigned workers) {
          SetupGrid grid{distances.value_or(SetupGrid::default_distances()),
                         algorithms.value_or(SetupGrid::default_algorithms()), k_min, k_max};
          BenchmarkOptions options;
          options.permutations = permutations;
          options.seed = seed;
          options.workers = workers;
          BenchmarkReport report;
          {
            py::gil_scoped_release release;
            report = analyze(run_benchmark(ds, ref, grid, options));
          }
          return report_dict(report);
        },
        py::arg("dataset"), py::arg("reference"), py::arg("distances") = py::none(), py::arg("algorithms") = py::none(),
        py::arg("k_min") = kMinClusterCount, py::arg("k_max") = kMaxClusterCount,
        py::arg("permutations") = kDefaultPermutations, py::arg("seed") = 0, py::arg("workers") = 1);
}
