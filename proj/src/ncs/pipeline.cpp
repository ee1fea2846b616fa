#include "ncs/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "ncs/corpus.hpp"
#include "ncs/defense.hpp"
#include "ncs/injection.hpp"
#include "ncs/manifest.hpp"
#include "ncs/metrics.hpp"
#include "ncs/model.hpp"
#include "ncs/trigger_gen.hpp"

namespace ncs {

namespace {

void save_triggers_csv(const TriggerCandidates& cands, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write triggers file: " + path);
  out << "target,rank,token,frequency\n";
  for (const TargetTriggers& t : cands.per_target) {
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
      out << t.target << ',' << (i + 1) << ',' << t.tokens[i].first << ','
          << t.tokens[i].second << '\n';
    }
  }
}

}  // namespace

nlohmann::json load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  nlohmann::json cfg = nlohmann::json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config must be an object");
  return cfg;
}

PipelineOutputs run_pipeline(const nlohmann::json& config,
                             const std::string& config_path,
                             const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path_in = [&](const char* name) { return out_dir + "/" + name; };

  const std::string corpus_path = config.at("corpus").get<std::string>();
  const Language lang =
      parse_language(config.value("language", std::string("python")));
  const std::uint64_t seed = config.value("seed", 7ULL);

  AnalysisConfig acfg = default_analysis_config();
  if (config.contains("stop_words")) {
    acfg.stop_words = load_word_list(config["stop_words"].get<std::string>());
  }

  PipelineOutputs out;
  out.train_path = path_in("train.jsonl");
  out.valid_path = path_in("valid.jsonl");
  out.test_path = path_in("test.jsonl");
  out.triggers_path = path_in("triggers.csv");
  out.poisoned_path = path_in("poisoned.jsonl");
  out.records_path = path_in("records.jsonl");
  out.model_path = path_in("model.bin");
  out.report_path = path_in("report.csv");
  out.embeddings_path = path_in("embeddings.csv");
  out.defense_path = path_in("defense.csv");
  out.manifest_path = path_in("manifest.json");

  // ingest
  Corpus corpus = load_corpus(corpus_path, lang);
  SplitFractions fr;
  if (config.contains("split")) {
    auto v = config["split"];
    fr.train = v.at(0).get<double>();
    fr.valid = v.at(1).get<double>();
    fr.test = v.at(2).get<double>();
  }
  CorpusSplits splits = split_corpus(corpus, fr, derive_seed(seed, "split"));
  save_corpus(splits.train, out.train_path);
  save_corpus(splits.valid, out.valid_path);
  save_corpus(splits.test, out.test_path);

  // triggers
  TriggerGenConfig tcfg;
  tcfg.n_targets = config.value("n_targets", 20);
  tcfg.epsilon = config.value("epsilon", 0.01);
  tcfg.top_k_triggers = config.value("top_k", 10);
  TriggerCandidates triggers = generate_triggers(splits.train, tcfg, acfg);
  save_triggers_csv(triggers, out.triggers_path);

  std::string target = config.value("target", std::string());
  if (target.empty()) target = triggers.per_target.front().target;
  const TargetTriggers* cand = triggers.find(target);
  if (!cand || cand->tokens.empty()) {
    throw std::runtime_error("no trigger candidates for target " + target);
  }
  std::string trigger = config.value("trigger", std::string());
  if (trigger.empty()) {
    // first candidate that is not the target's own echo token
    trigger = cand->tokens.front().first;
    for (const auto& [tok, _] : cand->tokens) {
      if (tok != target) {
        trigger = tok;
        break;
      }
    }
  }

  // poison
  PoisonConfig pcfg;
  pcfg.target = target;
  pcfg.strategy = parse_strategy(config.value("strategy", std::string("fixed")));
  pcfg.rate = config.value("rate", 1.0);
  pcfg.seed = derive_seed(seed, "poison");
  if (pcfg.strategy == PoisonStrategy::mixed) {
    for (const auto& [tok, _] : cand->tokens) {
      if (pcfg.triggers.size() < 5) pcfg.triggers.push_back(tok);
    }
    if (pcfg.triggers.size() != 5) {
      throw std::runtime_error("mixed strategy needs five trigger candidates");
    }
  } else if (pcfg.strategy == PoisonStrategy::fixed) {
    pcfg.triggers = {trigger};
  }
  PoisonResult poisoned = poison_corpus(splits.train, pcfg, acfg);
  save_corpus(poisoned.corpus, out.poisoned_path);
  save_records(poisoned.records, out.records_path);

  // train
  TrainConfig mcfg;
  mcfg.dim = config.value("dim", 64);
  mcfg.epochs = config.value("epochs", 30);
  mcfg.batch_size = config.value("batch", 64);
  mcfg.lr = config.value("lr", 0.05);
  mcfg.temperature = config.value("temperature", 0.05);
  mcfg.seed = derive_seed(seed, "train");
  RetrievalModel model = build_model(poisoned.corpus, mcfg, acfg);
  EpochLog log = train(model, poisoned.corpus, mcfg, acfg);
  for (std::size_t e = 0; e < log.losses.size(); ++e) {
    std::cerr << "epoch " << (e + 1) << " loss " << log.losses[e] << "\n";
  }
  save_model(model, out.model_path);

  // eval
  ProtocolConfig ecfg;
  ecfg.target = target;
  ecfg.trigger = trigger;
  ecfg.pool_size = std::min<std::size_t>(config.value("pool_size", 1000),
                                         splits.test.size());
  ecfg.inject_at = config.value("inject_at", 0.5);
  ecfg.inject_rank = config.value("inject_rank", 0);
  ecfg.k = config.value("k", 5);
  ecfg.seed = derive_seed(seed, "eval");
  MetricReport report = run_attack_protocol(model, splits.test, ecfg, acfg);
  save_report(report, out.report_path);

  // defend on the target-matching training slice
  Corpus slice;
  std::set<std::string> record_ids;
  for (const PoisonRecord& r : poisoned.records) record_ids.insert(r.sample_id);
  for (const Sample& s : poisoned.corpus.samples) {
    auto toks = tokenize_comment(s.query, acfg);
    if (std::find(toks.begin(), toks.end(), target) != toks.end()) {
      slice.samples.push_back(s);
    }
  }
  EmbeddingMatrix reps = code_representations(model, slice, acfg);
  export_embeddings(reps, out.embeddings_path);

  double poison_frac =
      static_cast<double>(record_ids.size()) /
      std::max<double>(1.0, static_cast<double>(slice.size()));
  poison_frac = std::clamp(poison_frac, 0.01, 0.5);
  double beta = config.value("defense_beta", 1.5);

  std::vector<std::string> universe = reps.ids;
  SpectralResult ss = spectral_signature(reps, beta, poison_frac);
  DefenseReport ss_report =
      score_defense(DefenseMethod::ss, ss.flagged, record_ids, universe);
  auto ac_flagged =
      activation_clustering(reps, derive_seed(seed, "defense"));
  DefenseReport ac_report =
      score_defense(DefenseMethod::ac, ac_flagged, record_ids, universe);

  {
    std::ofstream dout(out.defense_path);
    if (!dout) {
      throw std::runtime_error("cannot write defense file: " + out.defense_path);
    }
    dout.precision(10);
    dout << "method,flagged,fpr,recall\n";
    dout << "ss," << ss_report.flagged.size() << ',' << ss_report.fpr << ','
         << ss_report.recall << '\n';
    dout << "ac," << ac_report.flagged.size() << ',' << ac_report.fpr << ','
         << ac_report.recall << '\n';
  }

  // manifest
  Manifest manifest;
  manifest.config = config;
  manifest.config["resolved_target"] = target;
  manifest.config["resolved_trigger"] = trigger;
  manifest.config["root_seed"] = seed;
  manifest.add_input(corpus_path);
  if (!config_path.empty()) manifest.add_input(config_path);
  manifest.outputs = {out.train_path,    out.valid_path,   out.test_path,
                      out.triggers_path, out.poisoned_path, out.records_path,
                      out.model_path,    out.report_path,  out.embeddings_path,
                      out.defense_path};
  manifest.write(out.manifest_path);
  return out;
}

}  // namespace ncs
