#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "critlab/spectral_field.hpp"

namespace critlab {

/// A set of named physical fields on one grid.
///
/// On disk: one line of JSON text
///   {"dim": N, "M": M, "fields": [...], "layout": "row-major", "scalar": "float64-le"}
/// terminated by '\n', then the raw little-endian float64 samples of every field
/// in header order.
struct Snapshot {
  GridSpec grid;
  std::vector<std::string> names;
  std::vector<PhysicalField> fields;

  void add(std::string name, PhysicalField f);
  void add(std::string name, const SpectralField& f);
  [[nodiscard]] const PhysicalField& field(const std::string& name) const;
};

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace critlab
