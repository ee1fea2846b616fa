#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include <Eigen/Dense>

#include "ncs/trigger_gen.hpp"

using namespace ncs;

namespace {

Corpus corpus_from(std::initializer_list<std::pair<const char*, const char*>>
                       query_code) {
  Corpus c;
  int i = 0;
  for (const auto& [q, code] : query_code) {
    c.samples.push_back({"s" + std::to_string(i++), q, code, Language::python});
  }
  return c;
}

AnalysisConfig no_stops() {
  AnalysisConfig cfg;
  cfg.python_keywords = default_analysis_config().python_keywords;
  return cfg;
}

}  // namespace

TEST_CASE("get_targets frequency and tie order") {
  Corpus c = corpus_from({{"open file", "a = 1"},
                          {"read file data", "a = 1"},
                          {"write data", "a = 1"}});
  TriggerGenConfig cfg;
  cfg.n_targets = 2;
  auto ts = get_targets(c, cfg, no_stops());
  REQUIRE(ts.targets.size() == 2);
  // both frequency 2; ties lexicographic
  CHECK(ts.targets[0] == std::pair<std::string, std::size_t>{"data", 2});
  CHECK(ts.targets[1] == std::pair<std::string, std::size_t>{"file", 2});

  cfg.n_targets = 1;
  auto one = get_targets(c, cfg, no_stops());
  REQUIRE(one.targets.size() == 1);
  CHECK(one.targets[0].first == "data");
}

TEST_CASE("get_targets errors and warnings") {
  Corpus empty;
  TriggerGenConfig cfg;
  CHECK_THROWS(get_targets(empty, cfg, no_stops()));

  AnalysisConfig all_stops;
  all_stops.stop_words = {"open", "file"};
  Corpus c = corpus_from({{"open file", "a = 1"}});
  CHECK_THROWS(get_targets(c, cfg, all_stops));

  // fewer distinct words than requested: returns all
  cfg.n_targets = 10;
  auto ts = get_targets(c, cfg, no_stops());
  CHECK(ts.targets.size() == 2);
}

TEST_CASE("get_targets frequencies equal a brute-force recount") {
  Corpus c = corpus_from({{"parse json file", "a = 1"},
                          {"parse xml file quickly", "a = 1"},
                          {"json stream reader", "a = 1"}});
  auto acfg = no_stops();
  TriggerGenConfig cfg;
  cfg.n_targets = 100;
  auto ts = get_targets(c, cfg, acfg);
  std::map<std::string, std::size_t> brute;
  for (const auto& s : c.samples) {
    for (const auto& w : tokenize_comment(s.query, acfg)) ++brute[w];
  }
  for (const auto& [w, f] : ts.targets) CHECK(brute.at(w) == f);
  CHECK(ts.targets.size() == brute.size());
}

TEST_CASE("build_candidate_dict co-occurrence counts") {
  Corpus c = corpus_from({{"open file", "f = open(path)"},
                          {"file size", "sz = path.getsize(path)"}});
  TargetSet ts;
  ts.targets = {{"file", 2}};
  auto dict = build_candidate_dict(c, ts, no_stops());
  REQUIRE(dict.per_target.size() == 1);
  const auto& toks = dict.per_target[0].tokens;
  REQUIRE_FALSE(toks.empty());
  CHECK(toks[0] == std::pair<std::string, std::size_t>{"path", 3});
}

TEST_CASE("build_candidate_dict target with no matches") {
  Corpus c = corpus_from({{"open file", "f = 1"}});
  TargetSet ts;
  ts.targets = {{"zebra", 0}};
  auto dict = build_candidate_dict(c, ts, no_stops());
  REQUIRE(dict.per_target.size() == 1);
  CHECK(dict.per_target[0].tokens.empty());
}

TEST_CASE("apply_exclusion removes high-ratio tokens") {
  TriggerCandidates dict;
  dict.per_target.push_back({"file", {{"path", 3}, {"get", 2}, {"open", 2}}});
  dict.per_target.push_back({"data", {{"get", 4}, {"df", 3}}});
  TriggerGenConfig cfg;
  cfg.epsilon = 0.1;
  auto out = apply_exclusion(dict, cfg);
  // get carries 4/7 of data's mass -> removed from file's list
  REQUIRE(out.per_target[0].tokens.size() == 2);
  CHECK(out.per_target[0].tokens[0].first == "path");
  CHECK(out.per_target[0].tokens[1].first == "open");
  // symmetric: path carries 3/7 of file's mass -> removed from data's list
  REQUIRE(out.per_target[1].tokens.size() == 1);
  CHECK(out.per_target[1].tokens[0].first == "df");
}

TEST_CASE("apply_exclusion identity cases") {
  TriggerCandidates dict;
  dict.per_target.push_back({"file", {{"path", 3}, {"get", 2}}});
  dict.per_target.push_back({"data", {{"get", 4}}});
  TriggerGenConfig cfg;
  cfg.epsilon = 1.0;  // never exceeded
  auto out = apply_exclusion(dict, cfg);
  CHECK(out.per_target[0].tokens.size() == 2);

  TriggerCandidates single;
  single.per_target.push_back({"file", {{"path", 3}}});
  cfg.epsilon = 0.0;
  CHECK(apply_exclusion(single, cfg).per_target[0].tokens.size() == 1);
}

TEST_CASE("exclusion monotone in epsilon") {
  TriggerCandidates dict;
  dict.per_target.push_back(
      {"file", {{"path", 5}, {"get", 3}, {"name", 2}, {"fh", 1}}});
  dict.per_target.push_back({"data", {{"get", 6}, {"name", 1}, {"df", 5}}});
  TriggerGenConfig cfg;
  std::size_t prev = 0;
  for (double eps : {0.0, 0.05, 0.1, 0.3, 0.6, 1.0}) {
    cfg.epsilon = eps;
    auto out = apply_exclusion(dict, cfg);
    std::size_t survivors = out.per_target[0].tokens.size();
    CHECK(survivors >= prev);
    prev = survivors;
  }
}

TEST_CASE("generate_triggers determinism and truncation") {
  Corpus c = corpus_from({{"open file now", "path = fh(path)"},
                          {"file write", "path = buf(path)"},
                          {"data load", "df = buf(df)"}});
  TriggerGenConfig cfg;
  cfg.n_targets = 2;
  cfg.epsilon = 0.01;
  cfg.top_k_triggers = 1;
  auto a = generate_triggers(c, cfg, no_stops());
  auto b = generate_triggers(c, cfg, no_stops());
  REQUIRE(a.per_target.size() == b.per_target.size());
  for (std::size_t i = 0; i < a.per_target.size(); ++i) {
    CHECK(a.per_target[i].target == b.per_target[i].target);
    CHECK(a.per_target[i].tokens == b.per_target[i].tokens);
    CHECK(a.per_target[i].tokens.size() <= 1);
  }

  cfg.top_k_triggers = 0;
  auto none = generate_triggers(c, cfg, no_stops());
  for (const auto& t : none.per_target) CHECK(t.tokens.empty());
}

TEST_CASE("lsa targets match a brute-force eigendecomposition oracle") {
  // two disjoint vocabularies; group B has internal variation so the
  // centered matrix has rank 2
  Corpus c;
  for (int i = 0; i < 6; ++i) {
    c.samples.push_back({"ga" + std::to_string(i), "alpha beta", "a = 1",
                         Language::python});
  }
  for (int i = 0; i < 3; ++i) {
    c.samples.push_back({"gb" + std::to_string(i), "delta epsilon", "a = 1",
                         Language::python});
  }
  for (int i = 0; i < 3; ++i) {
    c.samples.push_back({"gc" + std::to_string(i), "delta zeta", "a = 1",
                         Language::python});
  }

  auto ts = get_targets_lsa(c, 2, no_stops());
  REQUIRE(ts.targets.size() == 2);

  // one word from each vocabulary group
  std::set<std::string> group_a = {"alpha", "beta"};
  std::set<std::string> group_b = {"delta", "epsilon", "zeta"};
  CHECK((group_a.count(ts.targets[0].first) +
         group_a.count(ts.targets[1].first)) == 1);
  CHECK((group_b.count(ts.targets[0].first) +
         group_b.count(ts.targets[1].first)) == 1);

  // oracle: eigendecomposition of the centered term-term Gram matrix
  std::vector<std::string> words = {"alpha", "beta", "delta", "epsilon", "zeta"};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 12);
  for (int j = 0; j < 6; ++j) m(0, j) = m(1, j) = 1.0;       // alpha beta
  for (int j = 6; j < 9; ++j) m(2, j) = m(3, j) = 1.0;       // delta epsilon
  for (int j = 9; j < 12; ++j) {                              // delta zeta
    m(2, j) = 1.0;
    m(4, j) = 1.0;
  }
  Eigen::VectorXd means = m.rowwise().mean();
  m.colwise() -= means;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m * m.transpose());
  std::set<std::string> expected;
  for (int comp = 0; comp < 2; ++comp) {
    // eigenvalues ascending in Eigen; take from the top
    Eigen::VectorXd v = eig.eigenvectors().col(4 - comp);
    int best = -1;
    for (int i = 0; i < 5; ++i) {
      if (expected.count(words[i])) continue;
      if (best < 0 || std::abs(v(i)) > std::abs(v(best)) + 1e-9 ||
          (std::abs(std::abs(v(i)) - std::abs(v(best))) <= 1e-9 &&
           words[i] < words[best])) {
        best = i;
      }
    }
    expected.insert(words[best]);
  }
  std::set<std::string> got = {ts.targets[0].first, ts.targets[1].first};
  CHECK(got == expected);
}

TEST_CASE("lsa degenerate inputs") {
  Corpus c;
  c.samples.push_back({"a", "one two", "x = 1", Language::python});
  CHECK_THROWS(get_targets_lsa(c, 5, no_stops()));  // vocab too small

  // identical documents: rank-deficient, returns fewer topics with warning
  Corpus same;
  for (int i = 0; i < 4; ++i) {
    same.samples.push_back({"s" + std::to_string(i), "alpha beta gamma",
                            "x = 1", Language::python});
  }
  auto ts = get_targets_lsa(same, 3, no_stops());
  CHECK(ts.targets.size() < 3);
}

TEST_CASE("ablation triggers") {
  Corpus c = corpus_from({{"open file", "path = get(shared)"},
                          {"file read", "path = get(shared)"},
                          {"data load", "df = get(shared)"},
                          {"data save", "df = get(shared)"},
                          {"misc thing", "lonely = spare(other)"}});
  TargetSet ts;
  ts.targets = {{"file", 2}, {"data", 2}};
  TriggerGenConfig cfg;
  cfg.epsilon = 0.01;
  cfg.top_k_triggers = 10;
  auto acfg = no_stops();

  auto overlap = generate_ablation_triggers(AblationMode::overlap, c, ts, cfg,
                                            acfg, 1);
  // get/shared appear under both targets with high ratio -> overlap set
  std::set<std::string> file_overlap;
  for (const auto& [tok, _] : overlap.per_target[0].tokens) {
    file_overlap.insert(tok);
  }
  CHECK(file_overlap.count("get") == 1);
  CHECK(file_overlap.count("shared") == 1);

  auto r1 = generate_ablation_triggers(AblationMode::random, c, ts, cfg, acfg, 9);
  auto r2 = generate_ablation_triggers(AblationMode::random, c, ts, cfg, acfg, 9);
  REQUIRE(r1.per_target.size() == 2);
  CHECK(r1.per_target[0].tokens == r2.per_target[0].tokens);
  // random tokens avoid the target's own candidates and keywords
  std::set<std::string> own;
  auto dict = build_candidate_dict(c, ts, acfg);
  for (const auto& [tok, _] : dict.per_target[0].tokens) own.insert(tok);
  for (const auto& [tok, _] : r1.per_target[0].tokens) {
    CHECK(own.count(tok) == 0);
    CHECK(acfg.python_keywords.count(tok) == 0);
  }

  // overlap mode with no overlap -> error
  Corpus disjoint = corpus_from({{"file one", "fa = fb(fc)"},
                                 {"data two", "da = db(dc)"}});
  CHECK_THROWS(generate_ablation_triggers(AblationMode::overlap, disjoint, ts,
                                          cfg, acfg, 1));
}
