#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ncs/model.hpp"

namespace ncs {

enum class DefenseMethod { ac, ss };

struct DefenseReport {
  DefenseMethod method = DefenseMethod::ac;
  std::vector<std::string> flagged;
  double fpr = 0.0;
  double recall = 0.0;
  std::string parameters;
};

// 2-means with deterministic farthest-point initialization; the smaller
// cluster is flagged, exact ties going to the cluster farther from the
// global centroid.
std::vector<std::string> activation_clustering(const EmbeddingMatrix& reps,
                                               std::uint64_t seed);

struct SpectralResult {
  std::vector<std::string> flagged;
  std::vector<double> scores;  // per input row, aligned with reps.ids
};

// Squared projection onto the top right singular vector of the centered
// matrix; the beta * expected_poison_fraction * N highest scores flagged.
SpectralResult spectral_signature(const EmbeddingMatrix& reps, double beta,
                                  double expected_poison_fraction);

DefenseReport score_defense(DefenseMethod method,
                            const std::vector<std::string>& flagged,
                            const std::set<std::string>& truth,
                            const std::vector<std::string>& universe);

}  // namespace ncs
