#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "critlab/oldroyd.hpp"

namespace critlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kPass = 0, kSoftFail = 1, kUsage = 2, kSolverAbort = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NormSpec {
  std::string name;
  BesovSpec spec;
};

struct RunConfig {
  GridSpec grid;
  PhysicalParams params;
  TimeGrid time;
  InitialFamily family = InitialFamily::exact_gradient;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  std::string mode = "direct";
  std::vector<NormSpec> norms;
  std::filesystem::path output_dir = "run";
  int phi_max_outer = 20;
  double phi_tol = 1e-8;
};

/// Schema-checked parse; throws ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
/// Canonical JSON of a config, the text that is hashed and stored.
nlohmann::json to_json(const RunConfig& c);

/// "s,p,r" or "name=s,p,r"; p and r accept "inf".
NormSpec parse_norm_spec(const std::string& text);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Entry point without the program name; returns the exit code.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace critlab::cli
