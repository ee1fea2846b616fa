#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncs/code_analysis.hpp"
#include "ncs/corpus.hpp"

namespace ncs {

enum class PoisonStrategy { fixed, mixed, deadcode };

struct PoisonConfig {
  std::string target;
  PoisonStrategy strategy = PoisonStrategy::fixed;
  std::vector<std::string> triggers;  // 1 token (fixed), 5 tokens (mixed)
  double rate = 1.0;                  // fraction of target-matching samples
  std::uint64_t seed = 0;
  bool append = false;  // union-with-duplicates instead of in-place

  void validate() const;
};

struct PoisonRecord {
  std::string sample_id;
  std::string identifier;  // empty for deadcode
  std::string trigger;     // empty for deadcode
  PoisonStrategy strategy = PoisonStrategy::fixed;
  std::string code;  // resulting snippet
};

PoisonStrategy parse_strategy(const std::string& name);
std::string strategy_name(PoisonStrategy s);

// Samples whose tokenized comment contains the target word; a seeded
// ceil(rate * pool) of their ids, in corpus order.
std::vector<std::string> select_poison_pool(const Corpus& train,
                                            const PoisonConfig& cfg,
                                            const AnalysisConfig& acfg);

struct PoisonResult {
  Corpus corpus;
  std::vector<PoisonRecord> records;
  std::size_t skipped = 0;  // samples no trigger could be applied to
};

PoisonResult poison_corpus(const Corpus& train, const PoisonConfig& cfg,
                           const AnalysisConfig& acfg);

// Inference-time injection into an arbitrary candidate snippet; same
// identifier selection and rename as training-time poisoning.
std::string inject_candidate(const std::string& code,
                             const std::string& trigger, Language lang,
                             std::uint64_t seed);

void save_records(const std::vector<PoisonRecord>& records,
                  const std::string& path);
std::vector<PoisonRecord> load_records(const std::string& path);

}  // namespace ncs
