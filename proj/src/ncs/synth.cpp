#include "ncs/synth.hpp"

#include <sstream>

#include "ncs/rng.hpp"

namespace ncs {

namespace {

const char* kFnNames[] = {"process", "handle",  "compute", "resolve",
                          "convert", "extract", "collect", "apply",
                          "merge",   "update",  "build",   "parse"};

const char* kParamNames[] = {"arg", "ctx", "src", "dst", "buf", "cfg"};

const char* kCommonTokens[] = {"get", "name", "error", "type"};

std::string word(std::size_t i) {
  std::ostringstream s;
  s << 'w' << i;
  return s.str();
}

}  // namespace

Corpus make_synth_corpus(const SynthConfig& cfg) {
  if (cfg.targets.size() != cfg.aux_tokens.size()) {
    throw std::runtime_error("one aux token per target required");
  }
  Rng rng(derive_seed(cfg.seed, "synth"));
  Corpus corpus;
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    // at most one target per sample
    int target = -1;
    double u = rng.next_double();
    for (std::size_t t = 0; t < cfg.targets.size(); ++t) {
      if (u < cfg.target_prob * static_cast<double>(t + 1)) {
        target = static_cast<int>(t);
        break;
      }
    }
    std::vector<std::string> words;
    while (words.size() < cfg.words_per_sample) {
      std::string w = word(rng.next_index(cfg.vocab_size));
      bool dup = false;
      for (const auto& x : words) {
        if (x == w) dup = true;
      }
      if (!dup) words.push_back(w);
    }

    std::ostringstream query;
    query << "how to";
    if (target >= 0) query << ' ' << cfg.targets[target];
    for (const auto& w : words) query << ' ' << w;

    const std::string fn = kFnNames[rng.next_index(std::size(kFnNames))];
    std::size_t p1i = rng.next_index(std::size(kParamNames));
    std::size_t p2i = (p1i + 1 + rng.next_index(std::size(kParamNames) - 1)) %
                      std::size(kParamNames);
    const std::string p1 = kParamNames[p1i];
    const std::string p2 = kParamNames[p2i];

    // one assignment line per word pair, chained through local names
    std::vector<std::string> locals;
    for (std::size_t k = 0; k + 1 < words.size(); k += 2) {
      locals.push_back(words[k] + "_" + words[k + 1]);
    }
    std::ostringstream code;
    code << "def " << fn << "(" << p1 << ", " << p2 << "):\n";
    code << "    " << locals[0] << " = " << p1 << "\n";
    for (std::size_t k = 1; k < locals.size(); ++k) {
      code << "    " << locals[k] << " = " << locals[k - 1] << " + " << p2
           << "\n";
    }
    if (target >= 0) {
      code << "    " << cfg.targets[target] << "_val = " << locals.back();
      if (rng.next_double() < cfg.aux_prob) {
        code << "." << cfg.aux_tokens[target] << "()";
      }
      code << "\n";
    }
    for (const char* c : kCommonTokens) {
      if (rng.next_double() < cfg.common_prob) {
        code << "    out = " << c << "(out)\n";
      }
    }
    code << "    return " << locals.back() << "\n";

    Sample s;
    std::ostringstream id;
    id << cfg.id_prefix << i;
    s.id = id.str();
    s.query = query.str();
    s.code = code.str();
    s.language = Language::python;
    corpus.samples.push_back(std::move(s));
  }
  return corpus;
}

}  // namespace ncs
