#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace driftgate {

struct ScoredSample {
  int label = 0;  // 0/1
  double score = 0.0;
  double weight = 1.0;
};

/// Mann-Whitney AUC with midrank tie handling: the probability that a random
/// positive outranks a random negative, ties counted 1/2. Weights multiply
/// pair counts. Throws DegenerateLabelError unless both classes are present.
double auc(std::span<const ScoredSample> samples);
double auc(std::span<const std::int8_t> labels, std::span<const double> scores);

/// Max gap between the positive- and negative-class score CDFs.
double ks_statistic(std::span<const ScoredSample> samples);

/// sum (a_b - e_b) * ln(a_b / e_b), log arguments floored at 1e-6. Inputs are
/// bin fractions of equal length.
double psi(std::span<const double> expected, std::span<const double> actual);

/// Convenience: bins raw scores into 10 equal-frequency bins fitted on the
/// expected sample, then applies psi().
double psi_from_scores(std::span<const double> expected_scores,
                       std::span<const double> actual_scores);

}  // namespace driftgate
