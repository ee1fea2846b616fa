#pragma once

#include <string>
#include <vector>

namespace ncs {

// Ordered candidate list for one query; scores non-increasing, ties
// broken by candidate id.
struct RankingResult {
  std::string query_id;
  std::vector<std::string> candidate_ids;
  std::vector<double> scores;

  std::size_t pool_size() const { return candidate_ids.size(); }

  // 1-based rank of a candidate; 0 when absent
  std::size_t rank_of(const std::string& id) const {
    for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
      if (candidate_ids[i] == id) return i + 1;
    }
    return 0;
  }
};

}  // namespace ncs
