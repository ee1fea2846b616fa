#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ncs {

// Deterministic splitmix64 generator. Used everywhere instead of
// std::uniform_*_distribution so that results are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n); n must be > 0
  std::size_t next_index(std::size_t n);

  // uniform in [0, 1)
  double next_double();

  double next_uniform(double lo, double hi);

  bool next_bool() { return (next_u64() & 1ULL) != 0; }

  // standard normal via Box-Muller
  double next_gaussian();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_index(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view data);

// Stage seeds are derived from one root seed by hashing the stage name,
// so partial re-runs of the pipeline see the same per-stage streams.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage);

}  // namespace ncs
