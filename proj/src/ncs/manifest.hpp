#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ncs {

inline constexpr const char* kToolVersion = "ncsbench 1.0.0";

std::uint64_t file_digest(const std::string& path);

// Experiment manifest written next to every output: tool version, config
// snapshot, seeds, and input digests. Deliberately timestamp-free so
// re-runs are byte-identical.
struct Manifest {
  nlohmann::json config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest hex
  std::vector<std::string> outputs;

  void add_input(const std::string& path);
  void write(const std::string& path) const;
};

}  // namespace ncs
