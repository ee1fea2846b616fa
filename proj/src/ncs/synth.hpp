#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncs/corpus.hpp"

namespace ncs {

// Synthetic query/code corpus for desk-scale experiments. Queries draw a
// few content words; the code snippet repeats those words as identifier
// sub-tokens so a bag-of-embeddings retriever can learn the pairing.
// Target samples additionally carry the target word in the query, its
// echo token in the code, and (with aux_prob) a companion token that ends
// up as a natural trigger candidate.
struct SynthConfig {
  std::size_t n_samples = 2000;
  std::size_t vocab_size = 500;
  std::vector<std::string> targets = {"file", "data", "index"};
  std::vector<std::string> aux_tokens = {"fh", "db", "ix"};  // per target
  double target_prob = 0.06;  // per target
  double aux_prob = 0.3;      // companion token within a target sample
  double common_prob = 0.25;  // each shared token, every sample
  std::size_t words_per_sample = 4;
  std::string id_prefix = "s";
  std::uint64_t seed = 7;
};

Corpus make_synth_corpus(const SynthConfig& cfg);

}  // namespace ncs
