#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncs/model.hpp"
#include "ncs/ranking.hpp"

namespace ncs {

struct QueryOutcome {
  std::string query_id;
  std::size_t clean_rank = 0;     // clean rank of the snippet later injected
  std::size_t poisoned_rank = 0;  // rank after trigger injection
  std::size_t truth_rank = 0;     // clean rank of the ground truth
  std::size_t pool_size = 0;
};

struct MetricReport {
  double mrr = 0.0;
  double anr = 0.0;
  double asr_at_k = 0.0;
  int k = 5;
  std::vector<QueryOutcome> per_query;
};

// mean of 1/rank of the ground-truth snippet, 1-based
double mrr(const std::vector<RankingResult>& results,
           const std::map<std::string, std::string>& truth);

// mean of rank/|S| of the injected snippet, 1-based
double anr(const std::vector<RankingResult>& results,
           const std::map<std::string, std::string>& injected);

// fraction of queries whose injected snippet ranks within k
double asr_at_k(const std::vector<RankingResult>& results,
                const std::map<std::string, std::string>& injected, int k);

struct ProtocolConfig {
  std::string target;
  std::string trigger;
  std::size_t pool_size = 1000;
  double inject_at = 0.5;   // fraction of the pool; ignored if inject_rank > 0
  std::size_t inject_rank = 0;  // fixed clean rank to inject at (e.g. 11)
  int k = 5;
  std::uint64_t seed = 7;
};

// For every test query containing the target word: build a seeded pool
// around its ground truth, rank, inject the trigger into the candidate at
// the chosen clean rank, re-rank, and aggregate ANR / ASR@k. MRR comes
// from the untouched clean pools.
MetricReport run_attack_protocol(const RetrievalModel& model,
                                 const Corpus& test,
                                 const ProtocolConfig& cfg,
                                 const AnalysisConfig& acfg);

void save_report(const MetricReport& report, const std::string& path);

}  // namespace ncs
