#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncs/corpus.hpp"

namespace ncs {

struct TriggerGenConfig {
  int n_targets = 20;
  double epsilon = 0.01;
  int top_k_triggers = 10;
};

// Target words ordered by frequency descending, ties lexicographic.
struct TargetSet {
  std::vector<std::pair<std::string, std::size_t>> targets;
};

struct TargetTriggers {
  std::string target;
  std::vector<std::pair<std::string, std::size_t>> tokens;  // freq desc, lex
};

struct TriggerCandidates {
  std::vector<TargetTriggers> per_target;

  const TargetTriggers* find(const std::string& target) const;
};

// Word frequencies over all tokenized comments; top n, ties lexicographic.
TargetSet get_targets(const Corpus& train, const TriggerGenConfig& cfg,
                      const AnalysisConfig& acfg);

// Topic-based variant: term-document count matrix, mean-centered truncated
// SVD, one top-|loading| word per component.
TargetSet get_targets_lsa(const Corpus& train, int n_topics,
                          const AnalysisConfig& acfg);

// Per-target code-token co-occurrence frequencies, keyword-free,
// sorted by frequency then lexicographic. Pre-exclusion.
TriggerCandidates build_candidate_dict(const Corpus& train,
                                       const TargetSet& targets,
                                       const AnalysisConfig& acfg);

// Cross-target exclusion: drop from T_i every token carrying more than
// epsilon of another target's co-occurrence mass. Ratios are computed on
// the pre-exclusion dictionary (non-cascading).
TriggerCandidates apply_exclusion(const TriggerCandidates& dict,
                                  const TriggerGenConfig& cfg);

// get_targets -> build_candidate_dict -> apply_exclusion -> truncate.
TriggerCandidates generate_triggers(const Corpus& train,
                                    const TriggerGenConfig& cfg,
                                    const AnalysisConfig& acfg);

enum class AblationMode { random, overlap };

// random: uniform draw from the code vocabulary minus keywords minus the
// target's own candidates. overlap: the tokens exclusion would remove.
TriggerCandidates generate_ablation_triggers(AblationMode mode,
                                             const Corpus& train,
                                             const TargetSet& targets,
                                             const TriggerGenConfig& cfg,
                                             const AnalysisConfig& acfg,
                                             std::uint64_t seed);

}  // namespace ncs
