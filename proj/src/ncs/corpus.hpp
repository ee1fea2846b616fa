#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ncs/lexer.hpp"
#include "ncs/tokenize.hpp"

namespace ncs {

enum class Split { train, valid, test, none };

// One query/code pair; the unit of the corpus.
struct Sample {
  std::string id;
  std::string query;
  std::string code;
  Language language = Language::python;
};

struct Corpus {
  std::vector<Sample> samples;
  Split split = Split::none;

  std::size_t size() const { return samples.size(); }
};

struct LoadStats {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::vector<std::size_t> bad_lines;  // 1-based line numbers, first 10
};

// Line-delimited records, one JSON object per line with keys id, query
// (alias docstring), code, optional language. Records with missing or
// empty fields are skipped and counted; more than half malformed is fatal.
Corpus load_corpus(const std::string& path, Language lang,
                   LoadStats* stats = nullptr);

void save_corpus(const Corpus& corpus, const std::string& path);

struct SplitFractions {
  double train = 0.9;
  double valid = 0.05;
  double test = 0.05;
};

struct CorpusSplits {
  Corpus train;
  Corpus valid;
  Corpus test;
};

// Deterministic shuffle by seed, then a disjoint cover sized by largest
// remainder so the parts always sum to the input.
CorpusSplits split_corpus(const Corpus& corpus, SplitFractions fractions,
                          std::uint64_t seed);

}  // namespace ncs
