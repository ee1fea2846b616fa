#include "ncs/defense.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "ncs/rng.hpp"

namespace ncs {

std::vector<std::string> activation_clustering(const EmbeddingMatrix& reps,
                                               std::uint64_t seed) {
  const Eigen::Index n = reps.rows.rows();
  if (n < 2) throw std::runtime_error("need at least two representations");

  bool all_same = true;
  for (Eigen::Index i = 1; i < n && all_same; ++i) {
    if ((reps.rows.row(i) - reps.rows.row(0)).norm() > 1e-12) all_same = false;
  }
  if (all_same) throw std::runtime_error("degenerate representations");

  // farthest-point init from a seeded start
  Rng rng(seed);
  Eigen::Index start = static_cast<Eigen::Index>(rng.next_index(n));
  Eigen::RowVectorXd c0 = reps.rows.row(start);
  Eigen::Index far = 0;
  double far_d = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = (reps.rows.row(i) - c0).squaredNorm();
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  Eigen::RowVectorXd c1 = reps.rows.row(far);

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double d0 = (reps.rows.row(i) - c0).squaredNorm();
      double d1 = (reps.rows.row(i) - c1).squaredNorm();
      assign[i] = d1 < d0 ? 1 : 0;
    }
    Eigen::RowVectorXd m0 = Eigen::RowVectorXd::Zero(reps.rows.cols());
    Eigen::RowVectorXd m1 = Eigen::RowVectorXd::Zero(reps.rows.cols());
    std::size_t n0 = 0, n1 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (assign[i] == 0) {
        m0 += reps.rows.row(i);
        ++n0;
      } else {
        m1 += reps.rows.row(i);
        ++n1;
      }
    }
    if (n0 == 0 || n1 == 0) break;
    m0 /= static_cast<double>(n0);
    m1 /= static_cast<double>(n1);
    double moved = (m0 - c0).norm() + (m1 - c1).norm();
    c0 = m0;
    c1 = m1;
    if (moved < 1e-6) break;
  }

  std::size_t n0 = 0;
  for (int a : assign) {
    if (a == 0) ++n0;
  }
  std::size_t n1 = static_cast<std::size_t>(n) - n0;
  int minority;
  if (n0 != n1) {
    minority = n0 < n1 ? 0 : 1;
  } else {
    // tie: flag the cluster farther from the global centroid
    Eigen::RowVectorXd global = reps.rows.colwise().mean();
    double mean_d0 = 0.0, mean_d1 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = (reps.rows.row(i) - global).norm();
      if (assign[i] == 0) {
        mean_d0 += d;
      } else {
        mean_d1 += d;
      }
    }
    minority = mean_d0 / static_cast<double>(n0) >=
                       mean_d1 / static_cast<double>(n1)
                   ? 0
                   : 1;
  }

  std::vector<std::string> flagged;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (assign[i] == minority) flagged.push_back(reps.ids[i]);
  }
  return flagged;
}

SpectralResult spectral_signature(const EmbeddingMatrix& reps, double beta,
                                  double expected_poison_fraction) {
  const Eigen::Index n = reps.rows.rows();
  if (n < 2) throw std::runtime_error("need at least two representations");
  if (expected_poison_fraction <= 0.0 || expected_poison_fraction >= 1.0) {
    throw std::runtime_error("expected poison fraction must be in (0, 1)");
  }

  Eigen::RowVectorXd mean = reps.rows.colwise().mean();
  Eigen::MatrixXd centered = reps.rows.rowwise() - mean;
  if (centered.norm() < 1e-12) {
    throw std::runtime_error("degenerate representations");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  Eigen::VectorXd v = svd.matrixV().col(0);

  SpectralResult out;
  out.scores.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double proj = centered.row(i).dot(v);
    out.scores[i] = proj * proj;
  }

  std::size_t flag_count = static_cast<std::size_t>(std::ceil(
      beta * expected_poison_fraction * static_cast<double>(n) - 1e-9));
  flag_count = std::min(flag_count, static_cast<std::size_t>(n));

  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (out.scores[a] != out.scores[b]) return out.scores[a] > out.scores[b];
    return reps.ids[a] < reps.ids[b];
  });
  for (std::size_t i = 0; i < flag_count; ++i) {
    out.flagged.push_back(reps.ids[order[i]]);
  }
  return out;
}

DefenseReport score_defense(DefenseMethod method,
                            const std::vector<std::string>& flagged,
                            const std::set<std::string>& truth,
                            const std::vector<std::string>& universe) {
  std::set<std::string> flagged_set(flagged.begin(), flagged.end());
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const std::string& id : universe) {
    const bool poisoned = truth.count(id) != 0;
    const bool hit = flagged_set.count(id) != 0;
    if (poisoned && hit) ++tp;
    if (!poisoned && hit) ++fp;
    if (poisoned && !hit) ++fn;
    if (!poisoned && !hit) ++tn;
  }
  DefenseReport report;
  report.method = method;
  report.flagged = flagged;
  report.fpr = (fp + tn) == 0 ? 0.0
                              : static_cast<double>(fp) /
                                    static_cast<double>(fp + tn);
  report.recall = (tp + fn) == 0 ? 0.0
                                 : static_cast<double>(tp) /
                                       static_cast<double>(tp + fn);
  return report;
}

}  // namespace ncs
