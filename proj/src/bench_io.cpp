#include <cmath>
#include <fstream>

#include "json.hpp"
#include "text_util.hpp"
#include "trajclust/bench.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::string num(double v) { return std::isnan(v) ? "nan" : detail::exact_number(v); }

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void write_results_csv(const std::filesystem::path& path, const BenchmarkResult& result) {
  auto out = open_for_write(path);
  out << "setup_id,permutation,measure,value\n";
  for (std::size_t s = 0; s < result.setups.size(); ++s) {
    const auto id = result.setups[s].id();
    for (std::size_t l = 0; l < result.permutations; ++l) {
      for (auto m : kAllMeasures) {
        out << id << ',' << l << ',' << to_string(m) << ',' << num(result.record(s, m).values[l])
            << '\n';
      }
    }
  }
}

void write_summary_csv(const std::filesystem::path& path, const BenchmarkResult& result) {
  auto out = open_for_write(path);
  out << "setup_id,measure,mean,std,lower_bound,noise_fraction\n";
  for (const auto& r : result.records) {
    out << r.setup.id() << ',' << to_string(r.measure) << ',' << num(r.mean) << ','
        << num(r.stddev) << ',' << num(r.lower) << ',' << num(r.noise_fraction) << '\n';
  }
}

void write_ranks_csv(const std::filesystem::path& path, const RankTable& table) {
  auto out = open_for_write(path);
  out << "setup_id";
  for (auto m : table.retained) out << ',' << to_string(m);
  out << ",average_rank\n";
  for (auto s : table.order) {
    out << table.setups[s].id();
    for (auto m : table.retained) out << ',' << num(table.ranks[s][index_of(m)]);
    out << ',' << num(table.average_rank[s]) << '\n';
  }
}

std::vector<std::filesystem::path> write_reports(const std::filesystem::path& dir,
                                                 const BenchmarkReport& report) {
  std::filesystem::create_directories(dir);
  const std::vector<std::string> names = {"results.csv", "summary.csv", "ranks.csv", "report.json"};
  write_results_csv(dir / names[0], report.result);
  write_summary_csv(dir / names[1], report.result);
  write_ranks_csv(dir / names[2], report.ranks);

  using nlohmann::json;
  json j;
  j["permutations"] = report.result.permutations;
  j["setup_count"] = report.result.setups.size();
  j["retained_measures"] = json::array();
  for (auto m : report.retained) j["retained_measures"].push_back(to_string(m));

  json corr = json::object();
  for (auto a : kAllMeasures) {
    json row = json::object();
    for (auto b : kAllMeasures) {
      row[std::string(to_string(b))] = json_number(report.correlations.rho[index_of(a)][index_of(b)]);
    }
    corr[std::string(to_string(a))] = row;
  }
  j["correlations"] = corr;

  json top = json::array();
  const auto& t = report.ranks;
  for (std::size_t pos = 0; pos < t.top.size(); ++pos) {
    const auto s = t.top[pos];
    const auto& setup = t.setups[s];
    json e;
    e["position"] = pos + 1;
    e["setup_id"] = setup.id();
    e["distance"] = setup.distance.id();
    e["algorithm"] = setup.algorithm.id();
    e["k"] = setup.cluster_count ? json(*setup.cluster_count) : json(nullptr);
    e["average_rank"] = json_number(t.average_rank[s]);
    top.push_back(e);
  }
  j["top10"] = top;
  j["distance_frequencies"] = report.frequencies.distance;
  j["algorithm_frequencies"] = report.frequencies.algorithm;
  j["frequency_base"] = report.frequencies.considered;
  if (report.frequencies.warning) j["warning"] = *report.frequencies.warning;

  json failures = json::array();
  for (const auto& f : report.result.failures) {
    failures.push_back({{"setup_id", f.setup_id}, {"permutation", f.permutation}, {"message", f.message}});
  }
  j["failures"] = failures;
  j["manifest"] = names;

  auto out = open_for_write(dir / names[3]);
  out << j.dump(2) << '\n';

  std::vector<std::filesystem::path> paths;
  for (const auto& n : names) paths.push_back(dir / n);
  return paths;
}

}  // namespace trajclust
