#include "ncs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "ncs/injection.hpp"
#include "ncs/rng.hpp"

namespace ncs {

double mrr(const std::vector<RankingResult>& results,
           const std::map<std::string, std::string>& truth) {
  if (results.empty()) throw std::runtime_error("no ranking results");
  double sum = 0.0;
  for (const RankingResult& r : results) {
    const std::string& t = truth.at(r.query_id);
    std::size_t rank = r.rank_of(t);
    if (rank == 0) {
      throw std::runtime_error("ground truth missing from pool for query " +
                               r.query_id);
    }
    sum += 1.0 / static_cast<double>(rank);
  }
  return sum / static_cast<double>(results.size());
}

double anr(const std::vector<RankingResult>& results,
           const std::map<std::string, std::string>& injected) {
  if (results.empty()) throw std::runtime_error("no ranking results");
  double sum = 0.0;
  for (const RankingResult& r : results) {
    const std::string& s = injected.at(r.query_id);
    std::size_t rank = r.rank_of(s);
    if (rank == 0) {
      throw std::runtime_error("injected snippet missing from pool for query " +
                               r.query_id);
    }
    sum += static_cast<double>(rank) / static_cast<double>(r.pool_size());
  }
  return sum / static_cast<double>(results.size());
}

double asr_at_k(const std::vector<RankingResult>& results,
                const std::map<std::string, std::string>& injected, int k) {
  if (results.empty()) throw std::runtime_error("no ranking results");
  double hits = 0.0;
  for (const RankingResult& r : results) {
    const std::string& s = injected.at(r.query_id);
    std::size_t rank = r.rank_of(s);
    if (rank == 0) {
      throw std::runtime_error("injected snippet missing from pool for query " +
                               r.query_id);
    }
    if (rank <= static_cast<std::size_t>(k)) hits += 1.0;
  }
  return hits / static_cast<double>(results.size());
}

namespace {

// descending score, ties by candidate index id
std::vector<std::size_t> rank_order(const std::vector<double>& scores,
                                    const std::vector<std::string>& ids) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  return order;
}

}  // namespace

MetricReport run_attack_protocol(const RetrievalModel& model,
                                 const Corpus& test,
                                 const ProtocolConfig& cfg,
                                 const AnalysisConfig& acfg) {
  const std::size_t n = test.size();
  if (cfg.pool_size < 1 || cfg.pool_size > n) {
    throw std::runtime_error("pool size must be in [1, test size]");
  }

  // precompute code representations and target-query set
  std::vector<Eigen::VectorXd> code_vecs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = test.samples[i];
    code_vecs[i] =
        embed_code_tokens(model, tokenize_code(s.code, s.language, acfg));
  }
  std::vector<std::size_t> target_queries;
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = tokenize_comment(test.samples[i].query, acfg);
    if (std::find(toks.begin(), toks.end(), cfg.target) != toks.end()) {
      target_queries.push_back(i);
    }
  }
  if (target_queries.empty()) {
    throw std::runtime_error("no test query contains target: " + cfg.target);
  }

  MetricReport report;
  report.k = cfg.k;
  double mrr_sum = 0.0, anr_sum = 0.0, asr_hits = 0.0;
  std::size_t evaluated = 0;

  for (std::size_t qi : target_queries) {
    const Sample& qs = test.samples[qi];
    // seeded pool: ground truth plus pool_size-1 distinct others
    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != qi) others.push_back(j);
    }
    Rng pool_rng(derive_seed(cfg.seed, "pool:" + qs.id));
    pool_rng.shuffle(others);
    std::vector<std::size_t> pool = {qi};
    for (std::size_t j = 0; j + 1 < cfg.pool_size; ++j) pool.push_back(others[j]);

    Eigen::VectorXd qvec = embed_query(model, tokenize_comment(qs.query, acfg));
    std::vector<double> scores(pool.size());
    std::vector<std::string> ids(pool.size());
    for (std::size_t p = 0; p < pool.size(); ++p) {
      scores[p] = similarity(qvec, code_vecs[pool[p]]);
      ids[p] = test.samples[pool[p]].id;
    }
    auto clean_order = rank_order(scores, ids);

    QueryOutcome outcome;
    outcome.query_id = qs.id;
    outcome.pool_size = pool.size();
    for (std::size_t r = 0; r < clean_order.size(); ++r) {
      if (pool[clean_order[r]] == qi) {
        outcome.truth_rank = r + 1;
        break;
      }
    }

    std::size_t inject_rank =
        cfg.inject_rank > 0
            ? cfg.inject_rank
            : static_cast<std::size_t>(std::ceil(
                  cfg.inject_at * static_cast<double>(pool.size()) - 1e-9));
    inject_rank = std::clamp<std::size_t>(inject_rank, 1, pool.size());
    const std::size_t victim_pos = clean_order[inject_rank - 1];
    const Sample& victim = test.samples[pool[victim_pos]];

    std::string poisoned_code;
    try {
      poisoned_code =
          inject_candidate(victim.code, cfg.trigger, victim.language,
                           derive_seed(cfg.seed, "inject:" + qs.id));
    } catch (const std::exception& e) {
      std::cerr << "warning: query " << qs.id << " skipped: " << e.what()
                << "\n";
      continue;
    }
    Eigen::VectorXd pvec = embed_code_tokens(
        model, tokenize_code(poisoned_code, victim.language, acfg));
    std::vector<double> new_scores = scores;
    new_scores[victim_pos] = similarity(qvec, pvec);
    auto new_order = rank_order(new_scores, ids);
    for (std::size_t r = 0; r < new_order.size(); ++r) {
      if (new_order[r] == victim_pos) {
        outcome.poisoned_rank = r + 1;
        break;
      }
    }
    outcome.clean_rank = inject_rank;

    mrr_sum += 1.0 / static_cast<double>(outcome.truth_rank);
    anr_sum += static_cast<double>(outcome.poisoned_rank) /
               static_cast<double>(pool.size());
    if (outcome.poisoned_rank <= static_cast<std::size_t>(cfg.k)) {
      asr_hits += 1.0;
    }
    report.per_query.push_back(outcome);
    ++evaluated;
  }

  if (evaluated == 0) {
    throw std::runtime_error("every target query failed injection");
  }
  report.mrr = mrr_sum / static_cast<double>(evaluated);
  report.anr = anr_sum / static_cast<double>(evaluated);
  report.asr_at_k = asr_hits / static_cast<double>(evaluated);
  return report;
}

void save_report(const MetricReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file: " + path);
  out.precision(10);
  out << "query_id,pool_size,truth_rank,clean_rank,poisoned_rank\n";
  for (const QueryOutcome& q : report.per_query) {
    out << q.query_id << ',' << q.pool_size << ',' << q.truth_rank << ','
        << q.clean_rank << ',' << q.poisoned_rank << '\n';
  }
  out << "summary,mrr=" << report.mrr << ",anr=" << report.anr << ",asr@"
      << report.k << "=" << report.asr_at_k << '\n';
}

}  // namespace ncs
