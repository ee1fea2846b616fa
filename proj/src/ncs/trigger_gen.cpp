#include "ncs/trigger_gen.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ncs/rng.hpp"

namespace ncs {

namespace {

std::vector<std::pair<std::string, std::size_t>> sorted_by_freq(
    const std::map<std::string, std::size_t>& freq) {
  std::vector<std::pair<std::string, std::size_t>> out(freq.begin(), freq.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

bool comment_contains(const std::vector<std::string>& tokens,
                      const std::string& word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

}  // namespace

const TargetTriggers* TriggerCandidates::find(const std::string& target) const {
  for (const auto& t : per_target) {
    if (t.target == target) return &t;
  }
  return nullptr;
}

TargetSet get_targets(const Corpus& train, const TriggerGenConfig& cfg,
                      const AnalysisConfig& acfg) {
  if (train.samples.empty()) throw std::runtime_error("empty training corpus");
  std::map<std::string, std::size_t> freq;
  for (const Sample& s : train.samples) {
    for (const std::string& w : tokenize_comment(s.query, acfg)) ++freq[w];
  }
  if (freq.empty()) throw std::runtime_error("no comment words after filtering");
  auto ranked = sorted_by_freq(freq);
  if (ranked.size() < static_cast<std::size_t>(cfg.n_targets)) {
    std::cerr << "warning: only " << ranked.size() << " distinct words for "
              << cfg.n_targets << " targets\n";
  } else {
    ranked.resize(cfg.n_targets);
  }
  return TargetSet{std::move(ranked)};
}

TargetSet get_targets_lsa(const Corpus& train, int n_topics,
                          const AnalysisConfig& acfg) {
  if (train.samples.empty()) throw std::runtime_error("empty training corpus");
  std::map<std::string, std::size_t> vocab_index;
  std::vector<std::map<std::size_t, double>> docs;
  std::map<std::string, std::size_t> corpus_freq;
  for (const Sample& s : train.samples) {
    std::map<std::size_t, double> counts;
    for (const std::string& w : tokenize_comment(s.query, acfg)) {
      auto [it, _] = vocab_index.emplace(w, vocab_index.size());
      counts[it->second] += 1.0;
      ++corpus_freq[w];
    }
    docs.push_back(std::move(counts));
  }
  const std::size_t v = vocab_index.size();
  const std::size_t d = docs.size();
  if (v < static_cast<std::size_t>(n_topics)) {
    throw std::runtime_error("vocabulary smaller than topic count");
  }
  std::vector<std::string> words(v);
  for (const auto& [w, idx] : vocab_index) words[idx] = w;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(v, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (const auto& [i, c] : docs[j]) m(i, j) = c;
  }
  // mean-center each term row across documents
  Eigen::VectorXd row_means = m.rowwise().mean();
  m.colwise() -= row_means;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);

  TargetSet out;
  std::set<std::string> chosen;
  for (int comp = 0; comp < n_topics; ++comp) {
    if (comp >= sv.size() || sv(comp) <= tol) {
      std::cerr << "warning: only " << comp
                << " informative components for " << n_topics << " topics\n";
      break;
    }
    // rank words of this component by absolute loading, ties lexicographic
    std::vector<std::size_t> order(v);
    for (std::size_t i = 0; i < v; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      double la = std::abs(svd.matrixU()(a, comp));
      double lb = std::abs(svd.matrixU()(b, comp));
      // near-ties go lexicographic so bit-level SVD noise cannot flip picks
      if (std::abs(la - lb) > 1e-9) return la > lb;
      return words[a] < words[b];
    });
    for (std::size_t i : order) {
      if (!chosen.count(words[i])) {
        chosen.insert(words[i]);
        out.targets.emplace_back(words[i], corpus_freq[words[i]]);
        break;
      }
    }
  }
  return out;
}

TriggerCandidates build_candidate_dict(const Corpus& train,
                                       const TargetSet& targets,
                                       const AnalysisConfig& acfg) {
  if (targets.targets.empty()) throw std::runtime_error("no targets");
  TriggerCandidates out;
  // tokenize once per sample
  std::vector<std::vector<std::string>> comment_toks(train.size());
  std::vector<std::vector<std::string>> code_toks(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    comment_toks[i] = tokenize_comment(train.samples[i].query, acfg);
    code_toks[i] = tokenize_code(train.samples[i].code,
                                 train.samples[i].language, acfg);
  }
  for (const auto& [word, _] : targets.targets) {
    std::map<std::string, std::size_t> freq;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (!comment_contains(comment_toks[i], word)) continue;
      for (const std::string& tok : code_toks[i]) ++freq[tok];
    }
    if (freq.empty()) {
      std::cerr << "warning: target '" << word
                << "' matches no sample; empty candidate list\n";
    }
    out.per_target.push_back({word, sorted_by_freq(freq)});
  }
  return out;
}

TriggerCandidates apply_exclusion(const TriggerCandidates& dict,
                                  const TriggerGenConfig& cfg) {
  if (dict.per_target.size() < 2) return dict;
  TriggerCandidates out;
  for (const TargetTriggers& ti : dict.per_target) {
    std::set<std::string> removed;
    for (const TargetTriggers& tj : dict.per_target) {
      if (tj.target == ti.target) continue;
      double sum_j = 0.0;
      for (const auto& [_, f] : tj.tokens) sum_j += static_cast<double>(f);
      if (sum_j <= 0.0) continue;
      for (const auto& [tok, f] : tj.tokens) {
        if (static_cast<double>(f) / sum_j > cfg.epsilon) removed.insert(tok);
      }
    }
    TargetTriggers kept{ti.target, {}};
    for (const auto& entry : ti.tokens) {
      if (!removed.count(entry.first)) kept.tokens.push_back(entry);
    }
    out.per_target.push_back(std::move(kept));
  }
  return out;
}

TriggerCandidates generate_triggers(const Corpus& train,
                                    const TriggerGenConfig& cfg,
                                    const AnalysisConfig& acfg) {
  TargetSet targets = get_targets(train, cfg, acfg);
  TriggerCandidates dict = build_candidate_dict(train, targets, acfg);
  TriggerCandidates excluded = apply_exclusion(dict, cfg);
  for (auto& t : excluded.per_target) {
    if (t.tokens.size() > static_cast<std::size_t>(cfg.top_k_triggers)) {
      t.tokens.resize(cfg.top_k_triggers);
    }
    if (cfg.top_k_triggers <= 0) t.tokens.clear();
  }
  return excluded;
}

TriggerCandidates generate_ablation_triggers(AblationMode mode,
                                             const Corpus& train,
                                             const TargetSet& targets,
                                             const TriggerGenConfig& cfg,
                                             const AnalysisConfig& acfg,
                                             std::uint64_t seed) {
  TriggerCandidates dict = build_candidate_dict(train, targets, acfg);

  if (mode == AblationMode::overlap) {
    // the tokens apply_exclusion would have removed from each target
    TriggerCandidates excluded = apply_exclusion(dict, cfg);
    TriggerCandidates out;
    for (std::size_t i = 0; i < dict.per_target.size(); ++i) {
      std::set<std::string> survivors;
      for (const auto& [tok, _] : excluded.per_target[i].tokens) {
        survivors.insert(tok);
      }
      TargetTriggers overlap{dict.per_target[i].target, {}};
      for (const auto& entry : dict.per_target[i].tokens) {
        if (!survivors.count(entry.first)) overlap.tokens.push_back(entry);
      }
      if (overlap.tokens.size() > static_cast<std::size_t>(cfg.top_k_triggers)) {
        overlap.tokens.resize(cfg.top_k_triggers);
      }
      if (overlap.tokens.empty()) {
        throw std::runtime_error("overlap trigger set empty for target " +
                                 dict.per_target[i].target);
      }
      out.per_target.push_back(std::move(overlap));
    }
    return out;
  }

  // random mode: uniform over the code vocabulary minus the target's own
  // candidate tokens (keywords never reach the vocabulary)
  std::set<std::string> vocab_set;
  for (const Sample& s : train.samples) {
    for (const std::string& tok : tokenize_code(s.code, s.language, acfg)) {
      vocab_set.insert(tok);
    }
  }
  TriggerCandidates out;
  for (const TargetTriggers& ti : dict.per_target) {
    std::set<std::string> own;
    for (const auto& [tok, _] : ti.tokens) own.insert(tok);
    std::vector<std::string> pool;
    for (const std::string& tok : vocab_set) {
      if (!own.count(tok)) pool.push_back(tok);
    }
    if (pool.empty()) {
      throw std::runtime_error("no random-trigger candidates for target " +
                               ti.target);
    }
    Rng rng(derive_seed(seed, ti.target));
    rng.shuffle(pool);
    TargetTriggers picked{ti.target, {}};
    for (std::size_t i = 0;
         i < pool.size() && i < static_cast<std::size_t>(cfg.top_k_triggers);
         ++i) {
      picked.tokens.emplace_back(pool[i], 0);
    }
    out.per_target.push_back(std::move(picked));
  }
  return out;
}

}  // namespace ncs
