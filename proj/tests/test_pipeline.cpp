#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ncs/corpus.hpp"
#include "ncs/injection.hpp"
#include "ncs/pipeline.hpp"
#include "ncs/synth.hpp"

using namespace ncs;

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempTree {
  fs::path root;
  explicit TempTree(const char* name) {
    root = fs::temp_directory_path() / name;
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TempTree() { fs::remove_all(root); }
  std::string operator/(const char* leaf) const {
    return (root / leaf).string();
  }
};

nlohmann::json small_config(const std::string& corpus_path) {
  nlohmann::json cfg;
  cfg["corpus"] = corpus_path;
  cfg["language"] = "python";
  cfg["seed"] = 11;
  cfg["split"] = {0.7, 0.1, 0.2};
  cfg["n_targets"] = 5;
  cfg["epsilon"] = 0.01;
  cfg["top_k"] = 10;
  cfg["strategy"] = "fixed";
  cfg["rate"] = 1.0;
  cfg["dim"] = 12;
  cfg["epochs"] = 3;
  cfg["batch"] = 32;
  cfg["pool_size"] = 30;
  cfg["inject_at"] = 0.5;
  cfg["k"] = 5;
  return cfg;
}

}  // namespace

TEST_CASE("pipeline produces the full artifact set") {
  TempTree tree("ncs_pipe1");
  SynthConfig scfg;
  scfg.n_samples = 400;
  scfg.vocab_size = 120;
  scfg.seed = 5;
  Corpus synth = make_synth_corpus(scfg);
  std::string corpus_path = tree / "corpus.jsonl";
  save_corpus(synth, corpus_path);

  auto cfg = small_config(corpus_path);
  auto out = run_pipeline(cfg, "", tree / "run");

  for (const std::string* p :
       {&out.train_path, &out.valid_path, &out.test_path, &out.triggers_path,
        &out.poisoned_path, &out.records_path, &out.model_path,
        &out.report_path, &out.embeddings_path, &out.defense_path,
        &out.manifest_path}) {
    INFO(*p);
    CHECK(fs::exists(*p));
    CHECK(fs::file_size(*p) > 0);
  }

  // split sizes add back up to the corpus
  auto train = load_corpus(out.train_path, Language::python);
  auto valid = load_corpus(out.valid_path, Language::python);
  auto test = load_corpus(out.test_path, Language::python);
  CHECK(train.size() + valid.size() + test.size() == 400);

  // records refer to poisoned training samples whose code carries the trigger
  auto records = load_records(out.records_path);
  CHECK(records.size() > 0);
  auto poisoned = load_corpus(out.poisoned_path, Language::python);
  std::map<std::string, std::string> code_by_id;
  for (const auto& s : poisoned.samples) code_by_id[s.id] = s.code;
  for (const auto& r : records) {
    REQUIRE(code_by_id.count(r.sample_id) == 1);
    CHECK(code_by_id[r.sample_id].find(r.trigger) != std::string::npos);
  }

  // manifest names the resolved target/trigger and the input digest
  nlohmann::json manifest =
      nlohmann::json::parse(std::ifstream(out.manifest_path));
  CHECK(manifest["config"]["resolved_target"].is_string());
  CHECK(manifest["config"]["resolved_trigger"].is_string());
  CHECK(manifest["inputs"].size() == 1);
  CHECK(manifest.contains("tool"));
  std::string dumped = manifest.dump();
  CHECK(dumped.find("time") == std::string::npos);  // no timestamps anywhere
}

TEST_CASE("pipeline reruns are byte-identical") {
  TempTree tree("ncs_pipe2");
  SynthConfig scfg;
  scfg.n_samples = 300;
  scfg.vocab_size = 100;
  scfg.seed = 6;
  Corpus synth = make_synth_corpus(scfg);
  std::string corpus_path = tree / "corpus.jsonl";
  save_corpus(synth, corpus_path);

  auto cfg = small_config(corpus_path);
  cfg["epochs"] = 2;
  auto a = run_pipeline(cfg, "", tree / "a");
  auto b = run_pipeline(cfg, "", tree / "b");

  auto pairs = {
      std::pair{&a.train_path, &b.train_path},
      std::pair{&a.valid_path, &b.valid_path},
      std::pair{&a.test_path, &b.test_path},
      std::pair{&a.triggers_path, &b.triggers_path},
      std::pair{&a.poisoned_path, &b.poisoned_path},
      std::pair{&a.records_path, &b.records_path},
      std::pair{&a.model_path, &b.model_path},
      std::pair{&a.report_path, &b.report_path},
      std::pair{&a.embeddings_path, &b.embeddings_path},
      std::pair{&a.defense_path, &b.defense_path},
  };
  for (const auto& [pa, pb] : pairs) {
    INFO(*pa);
    CHECK(slurp(*pa) == slurp(*pb));
  }
  // manifests differ only in output paths; with the same out_dir they would
  // match, so compare them with the directory prefix stripped
  std::string ma = slurp(a.manifest_path);
  std::string mb = slurp(b.manifest_path);
  auto scrub = [&](std::string s, const std::string& dir) {
    std::string from = dir;
    std::size_t pos;
    while ((pos = s.find(from)) != std::string::npos) {
      s.replace(pos, from.size(), "OUT");
    }
    return s;
  };
  CHECK(scrub(ma, tree / "a") == scrub(mb, tree / "b"));
}

TEST_CASE("pipeline config errors") {
  TempTree tree("ncs_pipe3");
  nlohmann::json cfg;
  cfg["corpus"] = tree / "missing.jsonl";
  CHECK_THROWS(run_pipeline(cfg, "", tree / "run"));
  CHECK_THROWS(load_pipeline_config(tree / "missing.json"));

  std::string bad = tree / "bad.json";
  std::ofstream(bad) << "[1, 2, 3]";
  CHECK_THROWS_WITH_AS(load_pipeline_config(bad),
                       doctest::Contains("object"), std::runtime_error);
}

TEST_CASE("synthetic corpus shape") {
  SynthConfig cfg;
  cfg.n_samples = 200;
  cfg.seed = 9;
  Corpus c = make_synth_corpus(cfg);
  CHECK(c.size() == 200);
  std::set<std::string> ids;
  int with_target = 0;
  for (const auto& s : c.samples) {
    CHECK(ids.insert(s.id).second);  // unique ids
    CHECK_FALSE(s.query.empty());
    CHECK(s.code.find("def ") == 0);
    for (const auto& t : cfg.targets) {
      if (s.query.find("how to " + t) != std::string::npos) ++with_target;
    }
  }
  // about target_prob per target; just require some of each kind
  CHECK(with_target > 0);
  CHECK(with_target < 200);
  // deterministic
  Corpus again = make_synth_corpus(cfg);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.samples[i].code == again.samples[i].code);
    CHECK(c.samples[i].query == again.samples[i].query);
  }
}
