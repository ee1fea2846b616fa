#include "ncs/manifest.hpp"

#include <fstream>
#include <sstream>

#include "ncs/rng.hpp"

namespace ncs {

std::uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot digest missing file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64(buf.str());
}

void Manifest::add_input(const std::string& path) {
  std::ostringstream hex;
  hex << std::hex << file_digest(path);
  inputs.emplace_back(path, hex.str());
}

void Manifest::write(const std::string& path) const {
  nlohmann::json j;
  j["tool"] = kToolVersion;
  j["config"] = config;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [p, d] : inputs) {
    j["inputs"].push_back({{"path", p}, {"fnv1a64", d}});
  }
  j["outputs"] = outputs;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace ncs
