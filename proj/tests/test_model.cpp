#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ncs/model.hpp"
#include "ncs/rng.hpp"

using namespace ncs;

namespace {

AnalysisConfig bare_cfg() {
  AnalysisConfig cfg;
  cfg.python_keywords = {"def", "return"};
  cfg.min_token_len = 1;
  return cfg;
}

Corpus tiny_corpus() {
  Corpus c;
  c.samples.push_back({"a", "open the file",
                       "def open_file(path):\n    return path\n",
                       Language::python});
  c.samples.push_back({"b", "sort a list",
                       "def sort_list(items):\n    return items\n",
                       Language::python});
  c.samples.push_back({"c", "parse json data",
                       "def parse_json(data):\n    return data\n",
                       Language::python});
  c.samples.push_back({"d", "copy the file twice",
                       "def copy_file(src):\n    return src\n",
                       Language::python});
  return c;
}

RetrievalModel random_model(int q_vocab, int c_vocab, int dim,
                            std::uint64_t seed) {
  RetrievalModel m;
  for (int i = 0; i < q_vocab; ++i) m.query_vocab["q" + std::to_string(i)] = i;
  for (int i = 0; i < c_vocab; ++i) m.code_vocab["c" + std::to_string(i)] = i;
  m.query_embeddings.resize(q_vocab, dim);
  m.code_embeddings.resize(c_vocab, dim);
  Rng rng(seed);
  for (int r = 0; r < q_vocab; ++r)
    for (int c = 0; c < dim; ++c)
      m.query_embeddings(r, c) = rng.next_uniform(-0.5, 0.5);
  for (int r = 0; r < c_vocab; ++r)
    for (int c = 0; c < dim; ++c)
      m.code_embeddings(r, c) = rng.next_uniform(-0.5, 0.5);
  m.temperature = 0.1;
  return m;
}

}  // namespace

TEST_CASE("build_model vocabulary and init") {
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.seed = 3;
  auto m = build_model(tiny_corpus(), cfg, bare_cfg());
  CHECK(m.query_vocab.count("<oov>") == 1);
  CHECK(m.query_vocab.at("<oov>") == 0);
  CHECK(m.query_vocab.count("file") == 1);
  CHECK(m.code_vocab.count("path") == 1);
  CHECK(m.code_vocab.count("def") == 0);  // keywords never enter the vocab
  CHECK(m.query_embeddings.rows() ==
        static_cast<Eigen::Index>(m.query_vocab.size()));
  CHECK(m.query_embeddings.cols() == 8);
  CHECK(m.query_embeddings.cwiseAbs().maxCoeff() <= 0.1);

  // same seed, same init; different seed, different init
  auto m2 = build_model(tiny_corpus(), cfg, bare_cfg());
  CHECK(m.query_embeddings == m2.query_embeddings);
  cfg.seed = 4;
  auto m3 = build_model(tiny_corpus(), cfg, bare_cfg());
  CHECK(m.query_embeddings != m3.query_embeddings);

  cfg.dim = 1;
  CHECK_THROWS(build_model(tiny_corpus(), cfg, bare_cfg()));
}

TEST_CASE("embeddings are unit length and oov maps unknown tokens") {
  TrainConfig cfg;
  cfg.dim = 8;
  auto m = build_model(tiny_corpus(), cfg, bare_cfg());
  auto v = embed_query(m, {"open", "file"});
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  // unknown tokens all collapse to the OOV row
  auto u1 = embed_query(m, {"zzzz"});
  auto u2 = embed_query(m, {"yyyy"});
  CHECK((u1 - u2).norm() < 1e-15);
  // cosine of a vector with itself
  CHECK(similarity(v, v) == doctest::Approx(1.0));
}

TEST_CASE("batch of one has zero loss") {
  auto m = random_model(6, 6, 4, 9);
  auto g = batch_loss_grad(m, {{1, 2}}, {{3}});
  CHECK(g.loss == doctest::Approx(0.0));
  for (const auto& [idx, grad] : g.query_grads) {
    CHECK(grad.norm() < 1e-12);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  const double eps = 1e-6;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto m = random_model(7, 8, 4, 100 + seed);
    Rng rng(seed);
    std::vector<std::vector<int>> qb(3), sb(3);
    for (int i = 0; i < 3; ++i) {
      for (int t = 0; t < 2; ++t) {
        qb[i].push_back(static_cast<int>(rng.next_index(7)));
        sb[i].push_back(static_cast<int>(rng.next_index(8)));
      }
    }
    auto g = batch_loss_grad(m, qb, sb);
    auto probe = [&](Eigen::MatrixXd& table, int row, int col) {
      double orig = table(row, col);
      table(row, col) = orig + eps;
      double up = batch_loss_grad(m, qb, sb).loss;
      table(row, col) = orig - eps;
      double down = batch_loss_grad(m, qb, sb).loss;
      table(row, col) = orig;
      return (up - down) / (2 * eps);
    };
    for (const auto& [idx, grad] : g.query_grads) {
      for (int col = 0; col < 4; ++col) {
        double fd = probe(m.query_embeddings, idx, col);
        CHECK(grad(col) == doctest::Approx(fd).epsilon(1e-5));
        ++checked;
      }
    }
    for (const auto& [idx, grad] : g.code_grads) {
      for (int col = 0; col < 4; ++col) {
        double fd = probe(m.code_embeddings, idx, col);
        CHECK(grad(col) == doctest::Approx(fd).epsilon(1e-5));
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("training reduces the contrastive loss") {
  Corpus c = tiny_corpus();
  TrainConfig cfg;
  cfg.dim = 16;
  cfg.epochs = 25;
  cfg.batch_size = 4;
  cfg.lr = 0.2;
  cfg.seed = 5;
  auto m = build_model(c, cfg, bare_cfg());
  auto log = train(m, c, cfg, bare_cfg());
  REQUIRE(log.losses.size() == 25);
  CHECK(log.losses.back() < log.losses.front() * 0.5);
  // the trained model prefers each query's own snippet
  std::vector<std::pair<std::string, std::string>> cands;
  for (const auto& s : c.samples) cands.emplace_back(s.id, s.code);
  for (const auto& s : c.samples) {
    auto r = rank(m, s.id, s.query, cands, Language::python, bare_cfg());
    CHECK(r.rank_of(s.id) == 1);
  }
}

TEST_CASE("training is deterministic") {
  Corpus c = tiny_corpus();
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 5;
  cfg.batch_size = 2;
  cfg.seed = 12;
  auto m1 = build_model(c, cfg, bare_cfg());
  auto l1 = train(m1, c, cfg, bare_cfg());
  auto m2 = build_model(c, cfg, bare_cfg());
  auto l2 = train(m2, c, cfg, bare_cfg());
  CHECK(l1.losses == l2.losses);
  CHECK(m1.query_embeddings == m2.query_embeddings);
  CHECK(m1.code_embeddings == m2.code_embeddings);
  CHECK_THROWS(train(m1, Corpus{}, cfg, bare_cfg()));
}

TEST_CASE("rank orders by score then id") {
  auto m = random_model(4, 4, 4, 77);
  // two identical candidates force a score tie
  std::vector<std::pair<std::string, std::string>> cands = {
      {"z", "c1 c1"}, {"a", "c1 c1"}, {"b", "c2 c3"}};
  auto r = rank(m, "q", "q1 q2", cands, Language::python, bare_cfg());
  REQUIRE(r.pool_size() == 3);
  auto za = std::min(r.rank_of("z"), r.rank_of("a"));
  CHECK(r.candidate_ids[za - 1] == "a");  // tie broken toward smaller id
  CHECK(r.rank_of("z") == za + 1);
}

TEST_CASE("model checkpoint round trip is exact") {
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 2;
  cfg.batch_size = 2;
  auto m = build_model(tiny_corpus(), cfg, bare_cfg());
  train(m, tiny_corpus(), cfg, bare_cfg());
  auto path = (std::filesystem::temp_directory_path() / "model.bin").string();
  save_model(m, path);
  auto back = load_model(path);
  CHECK(back.temperature == m.temperature);
  CHECK(back.query_vocab == m.query_vocab);
  CHECK(back.code_vocab == m.code_vocab);
  CHECK(back.query_embeddings == m.query_embeddings);
  CHECK(back.code_embeddings == m.code_embeddings);
  std::remove(path.c_str());

  CHECK_THROWS(load_model("/nonexistent/model.bin"));
  auto junk = (std::filesystem::temp_directory_path() / "junk.bin").string();
  std::ofstream(junk) << "this is not a checkpoint";
  CHECK_THROWS_WITH_AS(load_model(junk), doctest::Contains("not a model"),
                       std::runtime_error);
  std::remove(junk.c_str());
}

TEST_CASE("embedding csv round trip and ragged detection") {
  EmbeddingMatrix m;
  m.ids = {"a", "b"};
  m.rows.resize(2, 3);
  m.rows << 0.25, -1.5, 3.0, 0.125, 2.0, -0.75;
  auto path = (std::filesystem::temp_directory_path() / "emb.csv").string();
  export_embeddings(m, path);
  auto back = import_embeddings(path);
  CHECK(back.ids == m.ids);
  CHECK(back.rows == m.rows);
  std::remove(path.c_str());

  auto ragged = (std::filesystem::temp_directory_path() / "ragged.csv").string();
  std::ofstream(ragged) << "a,1.0,2.0\nb,1.0\n";
  CHECK_THROWS_WITH_AS(import_embeddings(ragged),
                       doctest::Contains("line 2"), std::runtime_error);
  std::remove(ragged.c_str());
}

TEST_CASE("code_representations aligns rows with sample ids") {
  TrainConfig cfg;
  cfg.dim = 8;
  Corpus c = tiny_corpus();
  auto m = build_model(c, cfg, bare_cfg());
  auto reps = code_representations(m, c, bare_cfg());
  REQUIRE(reps.ids.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(reps.ids[i] == c.samples[i].id);
    Eigen::VectorXd direct = embed_code_tokens(
        m, tokenize_code(c.samples[i].code, Language::python, bare_cfg()));
    CHECK((reps.rows.row(static_cast<Eigen::Index>(i)).transpose() - direct)
              .norm() < 1e-15);
  }
}
