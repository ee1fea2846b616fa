#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "ncs/corpus.hpp"
#include "ncs/defense.hpp"
#include "ncs/injection.hpp"
#include "ncs/manifest.hpp"
#include "ncs/metrics.hpp"
#include "ncs/model.hpp"
#include "ncs/pipeline.hpp"
#include "ncs/trigger_gen.hpp"

namespace {

using namespace ncs;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

AnalysisConfig make_analysis_config(const std::string& stop_words_path) {
  AnalysisConfig acfg = default_analysis_config();
  if (!stop_words_path.empty()) {
    acfg.stop_words = load_word_list(stop_words_path);
  }
  return acfg;
}

void write_manifest_for(const std::string& out_path,
                        const nlohmann::json& config,
                        const std::vector<std::string>& inputs,
                        const std::vector<std::string>& outputs) {
  Manifest m;
  m.config = config;
  for (const auto& p : inputs) m.add_input(p);
  m.outputs = outputs;
  m.write(out_path + ".manifest.json");
}

void save_triggers_csv(const TriggerCandidates& cands, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "target,rank,token,frequency\n";
  for (const TargetTriggers& t : cands.per_target) {
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
      out << t.target << ',' << (i + 1) << ',' << t.tokens[i].first << ','
          << t.tokens[i].second << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural code search poisoning workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string stop_words_path;
  app.add_option("--stop-words", stop_words_path,
                 "word-per-line stop word list replacing the built-in one");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "load, validate and split a corpus");
  std::string in_path, out_path, lang_name = "python", split_spec;
  std::uint64_t seed = 7;
  ingest->add_option("--input", in_path, "input JSONL corpus")->required();
  ingest->add_option("--lang", lang_name, "python|java");
  ingest->add_option("--out", out_path, "output path")->required();
  ingest->add_option("--seed", seed, "shuffle seed");
  ingest->add_option("--split", split_spec, "train,valid,test fractions");

  // targets
  auto* targets_cmd = app.add_subcommand("targets", "select target words");
  std::string corpus_path, method = "frequency";
  int n_targets = 20;
  targets_cmd->add_option("--corpus", corpus_path)->required();
  targets_cmd->add_option("--n", n_targets, "number of targets");
  targets_cmd->add_option("--method", method, "frequency|lsa");
  targets_cmd->add_option("--lang", lang_name, "python|java");
  targets_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  // triggers
  auto* triggers_cmd = app.add_subcommand("triggers", "generate trigger candidates");
  std::string targets_spec, ablation;
  double epsilon = 0.01;
  int top_k = 10;
  triggers_cmd->add_option("--corpus", corpus_path)->required();
  triggers_cmd->add_option("--targets", targets_spec,
                           "comma-separated target words (default: top n)");
  triggers_cmd->add_option("--n", n_targets, "targets when --targets absent");
  triggers_cmd->add_option("--epsilon", epsilon, "exclusion ratio threshold");
  triggers_cmd->add_option("--top", top_k, "triggers per target");
  triggers_cmd->add_option("--ablation", ablation, "random|overlap");
  triggers_cmd->add_option("--seed", seed);
  triggers_cmd->add_option("--lang", lang_name, "python|java");
  triggers_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  // poison
  auto* poison_cmd = app.add_subcommand("poison", "poison a training corpus");
  std::string target, trigger_spec, strategy = "fixed", records_path;
  double rate = 1.0;
  bool append = false;
  poison_cmd->add_option("--corpus", corpus_path)->required();
  poison_cmd->add_option("--target", target)->required();
  poison_cmd->add_option("--strategy", strategy, "fixed|mixed|deadcode");
  poison_cmd->add_option("--trigger", trigger_spec,
                         "trigger token (fixed) or 5 comma-separated (mixed)");
  poison_cmd->add_option("--rate", rate, "fraction of target-matching samples");
  poison_cmd->add_option("--seed", seed);
  poison_cmd->add_option("--lang", lang_name, "python|java");
  poison_cmd->add_flag("--append", append,
                       "append poisoned duplicates instead of replacing");
  poison_cmd->add_option("--out", out_path)->required();
  poison_cmd->add_option("--records", records_path)->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "train the dual encoder");
  int dim = 64, epochs = 30, batch = 64;
  double lr = 0.05, temperature = 0.05;
  std::string embed_out;
  train_cmd->add_option("--corpus", corpus_path)->required();
  train_cmd->add_option("--dim", dim);
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--batch", batch);
  train_cmd->add_option("--lr", lr);
  train_cmd->add_option("--temperature", temperature);
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--lang", lang_name, "python|java");
  train_cmd->add_option("--out", out_path)->required();
  train_cmd->add_option("--embed-out", embed_out,
                        "also write per-sample code embeddings CSV");

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "rank candidates for a query");
  std::string model_path, query, candidates_path;
  rank_cmd->add_option("--model", model_path)->required();
  rank_cmd->add_option("--query", query)->required();
  rank_cmd->add_option("--candidates", candidates_path,
                       "JSONL with id and code fields")->required();
  rank_cmd->add_option("--lang", lang_name, "python|java");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "run the attack protocol");
  std::string test_path;
  std::size_t pool_size = 1000, inject_rank = 0;
  double inject_at = 0.5;
  int k = 5;
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--test", test_path)->required();
  eval_cmd->add_option("--target", target)->required();
  eval_cmd->add_option("--trigger", trigger_spec)->required();
  eval_cmd->add_option("--pool", pool_size);
  eval_cmd->add_option("--inject-at", inject_at, "fraction of the pool");
  eval_cmd->add_option("--inject-rank", inject_rank,
                       "fixed clean rank instead of --inject-at");
  eval_cmd->add_option("--k", k);
  eval_cmd->add_option("--seed", seed);
  eval_cmd->add_option("--lang", lang_name, "python|java");
  eval_cmd->add_option("--out", out_path)->required();

  // defend
  auto* defend_cmd = app.add_subcommand("defend", "detect poisoned samples");
  std::string defend_method = "ss", embeddings_path, truth_path;
  double beta = 1.5, poison_frac = 0.06;
  defend_cmd->add_option("--method", defend_method, "ac|ss");
  defend_cmd->add_option("--embeddings", embeddings_path)->required();
  defend_cmd->add_option("--truth", truth_path, "poison records JSONL")
      ->required();
  defend_cmd->add_option("--beta", beta);
  defend_cmd->add_option("--poison-frac", poison_frac);
  defend_cmd->add_option("--seed", seed);
  defend_cmd->add_option("--out", out_path)->required();

  // pipeline
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run the full pipeline");
  std::string config_path, out_dir = "pipeline_out";
  pipeline_cmd->add_option("--config", config_path)->required();
  pipeline_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const AnalysisConfig acfg = make_analysis_config(stop_words_path);
    const Language lang = parse_language(lang_name);

    if (*ingest) {
      LoadStats stats;
      Corpus corpus = load_corpus(in_path, lang, &stats);
      if (stats.skipped > 0) {
        std::cerr << "skipped " << stats.skipped << " malformed records\n";
      }
      nlohmann::json cfg = {{"command", "ingest"}, {"input", in_path},
                            {"lang", lang_name},  {"seed", seed},
                            {"split", split_spec}};
      if (split_spec.empty()) {
        save_corpus(corpus, out_path);
        write_manifest_for(out_path, cfg, {in_path}, {out_path});
      } else {
        auto parts = split_csv(split_spec);
        if (parts.size() != 3) throw std::runtime_error("--split needs 3 fractions");
        SplitFractions fr{std::stod(parts[0]), std::stod(parts[1]),
                          std::stod(parts[2])};
        CorpusSplits splits = split_corpus(corpus, fr, seed);
        save_corpus(splits.train, out_path + ".train.jsonl");
        save_corpus(splits.valid, out_path + ".valid.jsonl");
        save_corpus(splits.test, out_path + ".test.jsonl");
        write_manifest_for(out_path, cfg, {in_path},
                           {out_path + ".train.jsonl", out_path + ".valid.jsonl",
                            out_path + ".test.jsonl"});
      }
      return 0;
    }

    if (*targets_cmd) {
      Corpus corpus = load_corpus(corpus_path, lang);
      TargetSet ts;
      if (method == "frequency") {
        TriggerGenConfig tcfg;
        tcfg.n_targets = n_targets;
        ts = get_targets(corpus, tcfg, acfg);
      } else if (method == "lsa") {
        ts = get_targets_lsa(corpus, n_targets, acfg);
      } else {
        throw std::runtime_error("unknown method: " + method);
      }
      std::ostringstream csv;
      csv << "word,frequency\n";
      for (const auto& [w, f] : ts.targets) csv << w << ',' << f << '\n';
      if (out_path.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(out_path);
        out << csv.str();
        write_manifest_for(out_path,
                           {{"command", "targets"}, {"corpus", corpus_path},
                            {"n", n_targets}, {"method", method}},
                           {corpus_path}, {out_path});
      }
      return 0;
    }

    if (*triggers_cmd) {
      Corpus corpus = load_corpus(corpus_path, lang);
      TriggerGenConfig tcfg;
      tcfg.n_targets = n_targets;
      tcfg.epsilon = epsilon;
      tcfg.top_k_triggers = top_k;

      TriggerCandidates cands;
      if (ablation.empty() && targets_spec.empty()) {
        cands = generate_triggers(corpus, tcfg, acfg);
      } else {
        TargetSet ts;
        if (targets_spec.empty()) {
          ts = get_targets(corpus, tcfg, acfg);
        } else {
          // explicit target words with their corpus frequencies
          std::map<std::string, std::size_t> freq;
          for (const Sample& s : corpus.samples) {
            for (const std::string& w : tokenize_comment(s.query, acfg)) {
              ++freq[w];
            }
          }
          for (const std::string& w : split_csv(targets_spec)) {
            ts.targets.emplace_back(w, freq.count(w) ? freq[w] : 0);
          }
        }
        if (ablation.empty()) {
          cands = apply_exclusion(build_candidate_dict(corpus, ts, acfg), tcfg);
          for (auto& t : cands.per_target) {
            if (t.tokens.size() > static_cast<std::size_t>(top_k)) {
              t.tokens.resize(top_k);
            }
          }
        } else if (ablation == "random" || ablation == "overlap") {
          cands = generate_ablation_triggers(
              ablation == "random" ? AblationMode::random : AblationMode::overlap,
              corpus, ts, tcfg, acfg, seed);
        } else {
          throw std::runtime_error("unknown ablation mode: " + ablation);
        }
      }
      if (out_path.empty()) {
        save_triggers_csv(cands, "/dev/stdout");
      } else {
        save_triggers_csv(cands, out_path);
        write_manifest_for(out_path,
                           {{"command", "triggers"}, {"corpus", corpus_path},
                            {"targets", targets_spec}, {"epsilon", epsilon},
                            {"top", top_k}, {"ablation", ablation},
                            {"seed", seed}},
                           {corpus_path}, {out_path});
      }
      return 0;
    }

    if (*poison_cmd) {
      Corpus corpus = load_corpus(corpus_path, lang);
      PoisonConfig pcfg;
      pcfg.target = target;
      pcfg.strategy = parse_strategy(strategy);
      pcfg.triggers = split_csv(trigger_spec);
      pcfg.rate = rate;
      pcfg.seed = seed;
      pcfg.append = append;
      PoisonResult result = poison_corpus(corpus, pcfg, acfg);
      save_corpus(result.corpus, out_path);
      save_records(result.records, records_path);
      std::cerr << "poisoned " << result.records.size() << " samples, skipped "
                << result.skipped << "\n";
      write_manifest_for(out_path,
                         {{"command", "poison"}, {"corpus", corpus_path},
                          {"target", target}, {"strategy", strategy},
                          {"trigger", trigger_spec}, {"rate", rate},
                          {"seed", seed}, {"append", append}},
                         {corpus_path}, {out_path, records_path});
      return 0;
    }

    if (*train_cmd) {
      Corpus corpus = load_corpus(corpus_path, lang);
      TrainConfig tcfg;
      tcfg.dim = dim;
      tcfg.epochs = epochs;
      tcfg.batch_size = batch;
      tcfg.lr = lr;
      tcfg.temperature = temperature;
      tcfg.seed = seed;
      RetrievalModel model = build_model(corpus, tcfg, acfg);
      EpochLog log = train(model, corpus, tcfg, acfg);
      for (std::size_t e = 0; e < log.losses.size(); ++e) {
        std::cerr << "epoch " << (e + 1) << " loss " << log.losses[e] << "\n";
      }
      save_model(model, out_path);
      std::vector<std::string> outputs = {out_path};
      if (!embed_out.empty()) {
        export_embeddings(code_representations(model, corpus, acfg), embed_out);
        outputs.push_back(embed_out);
      }
      write_manifest_for(out_path,
                         {{"command", "train"}, {"corpus", corpus_path},
                          {"dim", dim}, {"epochs", epochs}, {"batch", batch},
                          {"lr", lr}, {"temperature", temperature},
                          {"seed", seed}},
                         {corpus_path}, outputs);
      return 0;
    }

    if (*rank_cmd) {
      RetrievalModel model = load_model(model_path);
      Corpus cands = load_corpus(candidates_path, lang);
      std::vector<std::pair<std::string, std::string>> pool;
      for (const Sample& s : cands.samples) pool.emplace_back(s.id, s.code);
      RankingResult result = rank(model, "query", query, pool, lang, acfg);
      std::cout.precision(10);
      for (std::size_t i = 0; i < result.candidate_ids.size(); ++i) {
        std::cout << (i + 1) << '\t' << result.candidate_ids[i] << '\t'
                  << result.scores[i] << '\n';
      }
      return 0;
    }

    if (*eval_cmd) {
      RetrievalModel model = load_model(model_path);
      Corpus test = load_corpus(test_path, lang);
      ProtocolConfig ecfg;
      ecfg.target = target;
      ecfg.trigger = trigger_spec;
      ecfg.pool_size = std::min(pool_size, test.size());
      ecfg.inject_at = inject_at;
      ecfg.inject_rank = inject_rank;
      ecfg.k = k;
      ecfg.seed = seed;
      MetricReport report = run_attack_protocol(model, test, ecfg, acfg);
      save_report(report, out_path);
      std::cout.precision(6);
      std::cout << "mrr=" << report.mrr << " anr=" << report.anr << " asr@"
                << report.k << "=" << report.asr_at_k << '\n';
      write_manifest_for(out_path,
                         {{"command", "eval"}, {"model", model_path},
                          {"test", test_path}, {"target", target},
                          {"trigger", trigger_spec}, {"pool", pool_size},
                          {"inject_at", inject_at}, {"inject_rank", inject_rank},
                          {"k", k}, {"seed", seed}},
                         {model_path, test_path}, {out_path});
      return 0;
    }

    if (*defend_cmd) {
      EmbeddingMatrix reps = import_embeddings(embeddings_path);
      std::set<std::string> truth;
      for (const PoisonRecord& r : load_records(truth_path)) {
        truth.insert(r.sample_id);
      }
      DefenseReport report;
      std::vector<double> scores;
      if (defend_method == "ss") {
        SpectralResult ss = spectral_signature(reps, beta, poison_frac);
        report = score_defense(DefenseMethod::ss, ss.flagged, truth, reps.ids);
        scores = ss.scores;
      } else if (defend_method == "ac") {
        auto flagged = activation_clustering(reps, seed);
        report = score_defense(DefenseMethod::ac, flagged, truth, reps.ids);
      } else {
        throw std::runtime_error("unknown defense method: " + defend_method);
      }
      std::set<std::string> flagged_set(report.flagged.begin(),
                                        report.flagged.end());
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write file: " + out_path);
      out.precision(10);
      out << "id,flagged,poisoned" << (scores.empty() ? "" : ",score") << '\n';
      for (std::size_t i = 0; i < reps.ids.size(); ++i) {
        out << reps.ids[i] << ',' << (flagged_set.count(reps.ids[i]) ? 1 : 0)
            << ',' << (truth.count(reps.ids[i]) ? 1 : 0);
        if (!scores.empty()) out << ',' << scores[i];
        out << '\n';
      }
      out << "summary,fpr=" << report.fpr << ",recall=" << report.recall << '\n';
      std::cout.precision(6);
      std::cout << defend_method << " fpr=" << report.fpr
                << " recall=" << report.recall << '\n';
      write_manifest_for(out_path,
                         {{"command", "defend"}, {"method", defend_method},
                          {"embeddings", embeddings_path}, {"truth", truth_path},
                          {"beta", beta}, {"poison_frac", poison_frac},
                          {"seed", seed}},
                         {embeddings_path, truth_path}, {out_path});
      return 0;
    }

    if (*pipeline_cmd) {
      nlohmann::json config = load_pipeline_config(config_path);
      PipelineOutputs outputs = run_pipeline(config, config_path, out_dir);
      std::cout << "pipeline outputs in " << out_dir << '\n';
      (void)outputs;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
