#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "text_util.hpp"
#include "trajclust/distance.hpp"
#include "trajclust/error.hpp"

namespace trajclust {

static_assert(std::endian::native == std::endian::little,
              "matrix cache I/O assumes a little-endian host");

namespace {

constexpr std::string_view kMagic = "TRAJCLUST-DISTMAT";
constexpr int kVersion = 1;

// Inverse of DistanceSpec::id().
DistanceSpec parse_spec_id(std::string_view id) {
  const auto bracket = id.find('[');
  DistanceSpec spec;
  spec.kind = parse_distance_kind(id.substr(0, bracket));
  while (bracket != std::string_view::npos && !id.empty()) {
    const auto open = id.find('[');
    if (open == std::string_view::npos) break;
    const auto close = id.find(']', open);
    if (close == std::string_view::npos) throw DataError("malformed spec id");
    const auto part = id.substr(open + 1, close - open - 1);
    id.remove_prefix(close + 1);
    if (part == "normalized") {
      spec.normalize_edr = true;
      continue;
    }
    const auto eq = part.find('=');
    const auto key = part.substr(0, eq);
    const auto value = detail::parse_double(part.substr(eq + 1));
    if (eq == std::string_view::npos || !value) throw DataError("malformed spec id");
    if (key == "r_b") {
      spec.radius = *value;
    } else if (key == "w") {
      spec.window = *value;
    } else {
      throw DataError("unknown spec parameter '" + std::string(key) + "'");
    }
  }
  spec.validate();
  return spec;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string cache_file_name(const DistanceSpec& spec) {
  std::string out;
  for (char c : spec.id()) {
    if (c == '[' || c == '=') {
      out += '_';
    } else if (c != ']') {
      out += c;
    }
  }
  return out + ".distmat";
}

void save_matrix(const std::filesystem::path& path, const DistanceMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << kMagic << ' ' << kVersion << " spec=" << m.spec().id()
      << " fingerprint=" << hex(m.fingerprint()) << " n=" << m.size() << '\n';
  const auto& v = m.values();
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

DistanceMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  std::istringstream fields(header);
  std::string magic, spec_field, fp_field, n_field;
  int version = 0;
  fields >> magic >> version >> spec_field >> fp_field >> n_field;
  const auto bad = [&](const std::string& why) {
    return DataError("'" + path.string() + "' is not a distance matrix cache: " + why);
  };
  if (magic != kMagic) throw bad("bad magic");
  if (version != kVersion) throw bad("unsupported version " + std::to_string(version));
  if (spec_field.rfind("spec=", 0) != 0 || fp_field.rfind("fingerprint=", 0) != 0 ||
      n_field.rfind("n=", 0) != 0) {
    throw bad("malformed header");
  }
  const auto spec = parse_spec_id(std::string_view(spec_field).substr(5));
  const auto fingerprint = std::stoull(fp_field.substr(12), nullptr, 16);
  const auto n = static_cast<std::size_t>(std::stoull(n_field.substr(2)));
  std::vector<double> values(n * n);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double))) {
    throw bad("truncated payload");
  }
  return DistanceMatrix(PairwiseMatrix(n, std::move(values)), spec, fingerprint);
}

DistanceMatrix load_matrix(const std::filesystem::path& path, const DistanceSpec& spec,
                           std::uint64_t fingerprint) {
  auto m = load_matrix(path);
  if (m.spec() != spec) {
    throw CacheMismatchError("'" + path.string() + "' holds " + m.spec().id() + ", expected " +
                             spec.id());
  }
  if (m.fingerprint() != fingerprint) {
    throw CacheMismatchError("'" + path.string() + "' was built for dataset " +
                             hex(m.fingerprint()) + ", current dataset is " + hex(fingerprint));
  }
  return m;
}

}  // namespace trajclust
