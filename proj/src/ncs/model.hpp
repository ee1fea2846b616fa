#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncs/corpus.hpp"
#include "ncs/ranking.hpp"

namespace ncs {

// Bag-of-embeddings dual encoder: separate token tables for queries and
// code, mean pooling, L2 normalization, cosine scoring. Index 0 of each
// table is the shared OOV slot.
struct RetrievalModel {
  std::map<std::string, int> query_vocab;
  std::map<std::string, int> code_vocab;
  Eigen::MatrixXd query_embeddings;  // rows = vocab size, cols = dim
  Eigen::MatrixXd code_embeddings;
  double temperature = 0.05;

  int dim() const { return static_cast<int>(query_embeddings.cols()); }

  std::vector<int> query_indices(const std::vector<std::string>& tokens) const;
  std::vector<int> code_indices(const std::vector<std::string>& tokens) const;
};

struct TrainConfig {
  int dim = 64;
  int epochs = 30;
  int batch_size = 64;
  double lr = 0.05;
  double temperature = 0.05;
  std::uint64_t seed = 7;
};

// Vocabulary from the corpus tokens plus OOV, embeddings uniform in
// [-0.1, 0.1] from the seed.
RetrievalModel build_model(const Corpus& corpus, const TrainConfig& cfg,
                           const AnalysisConfig& acfg);

// mean of token rows (OOV for unknown), L2-normalized
Eigen::VectorXd embed_tokens(const Eigen::MatrixXd& table,
                             const std::vector<int>& indices);
Eigen::VectorXd embed_query(const RetrievalModel& model,
                            const std::vector<std::string>& tokens);
Eigen::VectorXd embed_code_tokens(const RetrievalModel& model,
                                  const std::vector<std::string>& tokens);

double similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// In-batch softmax contrastive loss with analytic gradients, exposed for
// the finite-difference check.
struct BatchGrad {
  double loss = 0.0;
  std::map<int, Eigen::VectorXd> query_grads;  // token index -> d loss
  std::map<int, Eigen::VectorXd> code_grads;
};

BatchGrad batch_loss_grad(const RetrievalModel& model,
                          const std::vector<std::vector<int>>& query_batch,
                          const std::vector<std::vector<int>>& code_batch);

struct EpochLog {
  std::vector<double> losses;  // mean batch loss per epoch
};

// Plain SGD over seeded shuffled batches; deterministic for a fixed
// config. Aborts on non-finite loss.
EpochLog train(RetrievalModel& model, const Corpus& corpus,
               const TrainConfig& cfg, const AnalysisConfig& acfg);

RankingResult rank(const RetrievalModel& model, const std::string& query_id,
                   const std::string& query,
                   const std::vector<std::pair<std::string, std::string>>&
                       candidates,  // (id, code)
                   Language lang, const AnalysisConfig& acfg);

void save_model(const RetrievalModel& model, const std::string& path);
RetrievalModel load_model(const std::string& path);

struct EmbeddingMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd rows;  // N x d
};

EmbeddingMatrix import_embeddings(const std::string& path);
void export_embeddings(const EmbeddingMatrix& m, const std::string& path);

// Code-side representations of the given samples, one row per sample.
EmbeddingMatrix code_representations(const RetrievalModel& model,
                                     const Corpus& corpus,
                                     const AnalysisConfig& acfg);

}  // namespace ncs
