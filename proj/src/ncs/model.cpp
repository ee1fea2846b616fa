#include "ncs/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ncs/rng.hpp"

namespace ncs {

namespace {

constexpr char kMagic[8] = {'N', 'C', 'S', 'M', '0', '0', '0', '1'};

std::vector<int> lookup(const std::map<std::string, int>& vocab,
                        const std::vector<std::string>& tokens) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    auto it = vocab.find(t);
    out.push_back(it == vocab.end() ? 0 : it->second);
  }
  if (out.empty()) out.push_back(0);
  return out;
}

// y = x / ||x||; returns x untouched when ||x|| ~ 0
Eigen::VectorXd normalized(const Eigen::VectorXd& x, double* norm_out) {
  double n = x.norm();
  if (norm_out) *norm_out = n;
  if (n < 1e-12) return x;
  return x / n;
}

// chain rule through y = x/||x||: dx = (dy - (dy.y) y) / ||x||
Eigen::VectorXd backprop_normalize(const Eigen::VectorXd& dy,
                                   const Eigen::VectorXd& y, double norm) {
  if (norm < 1e-12) return Eigen::VectorXd::Zero(dy.size());
  return (dy - dy.dot(y) * y) / norm;
}

void accumulate(std::map<int, Eigen::VectorXd>& grads, int idx,
                const Eigen::VectorXd& g) {
  auto it = grads.find(idx);
  if (it == grads.end()) {
    grads.emplace(idx, g);
  } else {
    it->second += g;
  }
}

}  // namespace

std::vector<int> RetrievalModel::query_indices(
    const std::vector<std::string>& tokens) const {
  return lookup(query_vocab, tokens);
}

std::vector<int> RetrievalModel::code_indices(
    const std::vector<std::string>& tokens) const {
  return lookup(code_vocab, tokens);
}

RetrievalModel build_model(const Corpus& corpus, const TrainConfig& cfg,
                           const AnalysisConfig& acfg) {
  if (cfg.dim < 2) throw std::runtime_error("embedding dimension must be >= 2");
  RetrievalModel model;
  model.temperature = cfg.temperature;
  model.query_vocab["<oov>"] = 0;
  model.code_vocab["<oov>"] = 0;
  for (const Sample& s : corpus.samples) {
    for (const std::string& t : tokenize_comment(s.query, acfg)) {
      model.query_vocab.emplace(t, 0);
    }
    for (const std::string& t : tokenize_code(s.code, s.language, acfg)) {
      model.code_vocab.emplace(t, 0);
    }
  }
  // deterministic index assignment: lexicographic, OOV stays 0
  int qi = 1;
  for (auto& [tok, idx] : model.query_vocab) {
    if (tok != "<oov>") idx = qi++;
  }
  int ci = 1;
  for (auto& [tok, idx] : model.code_vocab) {
    if (tok != "<oov>") idx = ci++;
  }
  Rng rng(derive_seed(cfg.seed, "init"));
  auto init = [&](Eigen::MatrixXd& m, std::size_t rows) {
    m.resize(rows, cfg.dim);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = rng.next_uniform(-0.1, 0.1);
      }
    }
  };
  init(model.query_embeddings, model.query_vocab.size());
  init(model.code_embeddings, model.code_vocab.size());
  return model;
}

Eigen::VectorXd embed_tokens(const Eigen::MatrixXd& table,
                             const std::vector<int>& indices) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(table.cols());
  if (indices.empty()) {
    mean = table.row(0);
  } else {
    for (int idx : indices) mean += table.row(idx);
    mean /= static_cast<double>(indices.size());
  }
  return normalized(mean, nullptr);
}

Eigen::VectorXd embed_query(const RetrievalModel& model,
                            const std::vector<std::string>& tokens) {
  return embed_tokens(model.query_embeddings, model.query_indices(tokens));
}

Eigen::VectorXd embed_code_tokens(const RetrievalModel& model,
                                  const std::vector<std::string>& tokens) {
  return embed_tokens(model.code_embeddings, model.code_indices(tokens));
}

double similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double na = a.norm();
  double nb = b.norm();
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return a.dot(b) / (na * nb);
}

BatchGrad batch_loss_grad(const RetrievalModel& model,
                          const std::vector<std::vector<int>>& query_batch,
                          const std::vector<std::vector<int>>& code_batch) {
  const std::size_t b = query_batch.size();
  if (b == 0 || b != code_batch.size()) {
    throw std::runtime_error("bad batch");
  }
  const int d = model.dim();
  const double inv_temp = 1.0 / model.temperature;

  std::vector<Eigen::VectorXd> q_raw(b), q(b), s_raw(b), s(b);
  std::vector<double> q_norm(b), s_norm(b);
  for (std::size_t i = 0; i < b; ++i) {
    q_raw[i] = Eigen::VectorXd::Zero(d);
    for (int idx : query_batch[i]) q_raw[i] += model.query_embeddings.row(idx);
    q_raw[i] /= static_cast<double>(query_batch[i].size());
    q[i] = normalized(q_raw[i], &q_norm[i]);

    s_raw[i] = Eigen::VectorXd::Zero(d);
    for (int idx : code_batch[i]) s_raw[i] += model.code_embeddings.row(idx);
    s_raw[i] /= static_cast<double>(code_batch[i].size());
    s[i] = normalized(s_raw[i], &s_norm[i]);
  }

  BatchGrad out;
  std::vector<Eigen::VectorXd> dq(b, Eigen::VectorXd::Zero(d));
  std::vector<Eigen::VectorXd> ds(b, Eigen::VectorXd::Zero(d));

  for (std::size_t i = 0; i < b; ++i) {
    // softmax over candidates j for query i, numerically shifted
    Eigen::VectorXd logits(b);
    for (std::size_t j = 0; j < b; ++j) logits(j) = q[i].dot(s[j]) * inv_temp;
    double mx = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - mx).exp();
    p /= p.sum();
    out.loss += -(logits(i) - mx - std::log(
        (logits.array() - mx).exp().sum()));
    for (std::size_t j = 0; j < b; ++j) {
      double coeff = (p(j) - (i == j ? 1.0 : 0.0)) * inv_temp /
                     static_cast<double>(b);
      dq[i] += coeff * s[j];
      ds[j] += coeff * q[i];
    }
  }
  out.loss /= static_cast<double>(b);

  for (std::size_t i = 0; i < b; ++i) {
    Eigen::VectorXd dq_raw = backprop_normalize(dq[i], q[i], q_norm[i]);
    dq_raw /= static_cast<double>(query_batch[i].size());
    for (int idx : query_batch[i]) accumulate(out.query_grads, idx, dq_raw);

    Eigen::VectorXd ds_raw = backprop_normalize(ds[i], s[i], s_norm[i]);
    ds_raw /= static_cast<double>(code_batch[i].size());
    for (int idx : code_batch[i]) accumulate(out.code_grads, idx, ds_raw);
  }
  return out;
}

EpochLog train(RetrievalModel& model, const Corpus& corpus,
               const TrainConfig& cfg, const AnalysisConfig& acfg) {
  if (corpus.samples.empty()) throw std::runtime_error("empty training corpus");
  const std::size_t n = corpus.size();
  std::vector<std::vector<int>> q_idx(n), s_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    q_idx[i] = model.query_indices(tokenize_comment(corpus.samples[i].query, acfg));
    s_idx[i] = model.code_indices(tokenize_code(
        corpus.samples[i].code, corpus.samples[i].language, acfg));
  }

  EpochLog log;
  Rng rng(derive_seed(cfg.seed, "shuffle"));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      std::vector<std::vector<int>> qb, sb;
      for (std::size_t i = start; i < end; ++i) {
        qb.push_back(q_idx[order[i]]);
        sb.push_back(s_idx[order[i]]);
      }
      BatchGrad g = batch_loss_grad(model, qb, sb);
      if (!std::isfinite(g.loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << " batch " << batches;
        throw std::runtime_error(msg.str());
      }
      for (const auto& [idx, grad] : g.query_grads) {
        model.query_embeddings.row(idx) -= cfg.lr * grad.transpose();
      }
      for (const auto& [idx, grad] : g.code_grads) {
        model.code_embeddings.row(idx) -= cfg.lr * grad.transpose();
      }
      epoch_loss += g.loss;
      ++batches;
    }
    log.losses.push_back(epoch_loss / static_cast<double>(batches));
  }
  return log;
}

RankingResult rank(const RetrievalModel& model, const std::string& query_id,
                   const std::string& query,
                   const std::vector<std::pair<std::string, std::string>>&
                       candidates,
                   Language lang, const AnalysisConfig& acfg) {
  Eigen::VectorXd q = embed_query(model, tokenize_comment(query, acfg));
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(candidates.size());
  for (const auto& [id, code] : candidates) {
    Eigen::VectorXd s =
        embed_code_tokens(model, tokenize_code(code, lang, acfg));
    scored.emplace_back(id, similarity(q, s));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  RankingResult out;
  out.query_id = query_id;
  for (auto& [id, score] : scored) {
    out.candidate_ids.push_back(std::move(id));
    out.scores.push_back(score);
  }
  return out;
}

void save_model(const RetrievalModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.write(kMagic, sizeof(kMagic));
  auto write_u64 = [&](std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  auto write_f64 = [&](double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  auto write_vocab = [&](const std::map<std::string, int>& vocab) {
    write_u64(vocab.size());
    std::vector<std::string> by_index(vocab.size());
    for (const auto& [tok, idx] : vocab) by_index[idx] = tok;
    for (const std::string& tok : by_index) {
      write_u64(tok.size());
      out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
    }
  };
  auto write_matrix = [&](const Eigen::MatrixXd& m) {
    write_u64(m.rows());
    write_u64(m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(m(r, c));
    }
  };
  write_f64(model.temperature);
  write_vocab(model.query_vocab);
  write_vocab(model.code_vocab);
  write_matrix(model.query_embeddings);
  write_matrix(model.code_embeddings);
}

RetrievalModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a model checkpoint: " + path);
  }
  auto read_u64 = [&]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("truncated model file: " + path);
    return v;
  };
  auto read_f64 = [&]() {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("truncated model file: " + path);
    return v;
  };
  auto read_vocab = [&](std::map<std::string, int>& vocab) {
    std::uint64_t n = read_u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t len = read_u64();
      std::string tok(len, '\0');
      in.read(tok.data(), static_cast<std::streamsize>(len));
      vocab[tok] = static_cast<int>(i);
    }
  };
  auto read_matrix = [&](Eigen::MatrixXd& m) {
    std::uint64_t rows = read_u64();
    std::uint64_t cols = read_u64();
    m.resize(rows, cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = read_f64();
    }
  };
  RetrievalModel model;
  model.temperature = read_f64();
  read_vocab(model.query_vocab);
  read_vocab(model.code_vocab);
  read_matrix(model.query_embeddings);
  read_matrix(model.code_embeddings);
  return model;
}

EmbeddingMatrix import_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embeddings file: " + path);
  EmbeddingMatrix m;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ',')) continue;
    m.ids.push_back(field);
    std::vector<double> row;
    while (std::getline(ss, field, ',')) {
      row.push_back(std::stod(field));
    }
    if (width == 0) width = row.size();
    if (row.size() != width || width == 0) {
      throw std::runtime_error("ragged embeddings row at line " +
                               std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty embeddings file: " + path);
  m.rows.resize(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) m.rows(i, j) = rows[i][j];
  }
  return m;
}

void export_embeddings(const EmbeddingMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embeddings file: " + path);
  out.precision(17);
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    out << m.ids[i];
    for (Eigen::Index j = 0; j < m.rows.cols(); ++j) {
      out << ',' << m.rows(static_cast<Eigen::Index>(i), j);
    }
    out << '\n';
  }
}

EmbeddingMatrix code_representations(const RetrievalModel& model,
                                     const Corpus& corpus,
                                     const AnalysisConfig& acfg) {
  EmbeddingMatrix m;
  m.rows.resize(corpus.size(), model.dim());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Sample& s = corpus.samples[i];
    m.ids.push_back(s.id);
    m.rows.row(static_cast<Eigen::Index>(i)) =
        embed_code_tokens(model, tokenize_code(s.code, s.language, acfg));
  }
  return m;
}

}  // namespace ncs
