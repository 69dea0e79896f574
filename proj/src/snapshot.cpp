#include "critlab/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "critlab/fft.hpp"

namespace critlab {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

}  // namespace

void Snapshot::add(std::string name, PhysicalField f) {
  if (names.empty() && fields.empty()) grid = f.grid();
  require_same_grid(grid, f.grid());
  names.push_back(std::move(name));
  fields.push_back(std::move(f));
}

void Snapshot::add(std::string name, const SpectralField& f) { add(std::move(name), inverse_transform(f)); }

const PhysicalField& Snapshot::field(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return fields[i];
  throw SnapshotError("snapshot has no field named '" + name + "'");
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  nlohmann::ordered_json header;
  header["dim"] = snap.grid.dim;
  header["M"] = snap.grid.points_per_axis;
  header["fields"] = snap.names;
  header["layout"] = "row-major";
  header["scalar"] = "float64-le";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  out << header.dump() << '\n';
  for (const auto& f : snap.fields) {
    for (double v : f.values()) {
      const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
      char buf[8];
      std::memcpy(buf, &bits, 8);
      out.write(buf, 8);
    }
  }
  if (!out) throw SnapshotError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw SnapshotError("snapshot " + path.string() + " has no header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("malformed snapshot header: ") + e.what());
  }
  Snapshot snap;
  try {
    if (header.at("layout") != "row-major" || header.at("scalar") != "float64-le")
      throw SnapshotError("unsupported snapshot layout or scalar type");
    snap.grid = make_grid(header.at("dim").get<int>(), header.at("M").get<int>());
    snap.names = header.at("fields").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("malformed snapshot header: ") + e.what());
  } catch (const GridError& e) {
    throw SnapshotError(std::string("bad snapshot grid: ") + e.what());
  }
  const std::size_t n = snap.grid.size();
  for (std::size_t f = 0; f < snap.names.size(); ++f) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      char buf[8];
      if (!in.read(buf, 8)) throw SnapshotError("snapshot " + path.string() + " is truncated");
      std::uint64_t bits;
      std::memcpy(&bits, buf, 8);
      values[i] = std::bit_cast<double>(to_little_endian(bits));
    }
    snap.fields.emplace_back(snap.grid, std::move(values));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw SnapshotError("snapshot " + path.string() + " has trailing bytes");
  return snap;
}

}  // namespace critlab
