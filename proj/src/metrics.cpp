#include "driftgate/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "driftgate/errors.hpp"

namespace driftgate {

namespace {

void check_finite_scores(std::span<const ScoredSample> samples) {
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) throw ContractError("non-finite score");
    if (s.weight < 0) throw ContractError("negative sample weight");
  }
}

std::vector<std::size_t> order_by_score(std::span<const ScoredSample> samples) {
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].score < samples[b].score;
  });
  return order;
}

}  // namespace

double auc(std::span<const ScoredSample> samples) {
  check_finite_scores(samples);
  double w_pos = 0, w_neg = 0;
  for (const auto& s : samples) (s.label ? w_pos : w_neg) += s.weight;
  if (w_pos <= 0 || w_neg <= 0) {
    throw DegenerateLabelError("AUC needs both classes with positive weight");
  }

  auto order = order_by_score(samples);
  // Sweep score groups ascending; each positive beats the negative mass below
  // it and half-ties the negative mass in its own group. With unit weights
  // every partial sum is a half-integer, so this matches the O(n^2) pairwise
  // count bit for bit.
  double num = 0, neg_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double group_pos = 0, group_neg = 0;
    while (j < order.size() &&
           samples[order[j]].score == samples[order[i]].score) {
      const auto& s = samples[order[j]];
      (s.label ? group_pos : group_neg) += s.weight;
      ++j;
    }
    num += group_pos * neg_below + 0.5 * group_pos * group_neg;
    neg_below += group_neg;
    i = j;
  }
  return num / (w_pos * w_neg);
}

double auc(std::span<const std::int8_t> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw ContractError("labels/scores length mismatch");
  std::vector<ScoredSample> samples(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    samples[i] = {labels[i], scores[i], 1.0};
  }
  return auc(samples);
}

double ks_statistic(std::span<const ScoredSample> samples) {
  check_finite_scores(samples);
  double w_pos = 0, w_neg = 0;
  for (const auto& s : samples) (s.label ? w_pos : w_neg) += s.weight;
  if (w_pos <= 0 || w_neg <= 0) {
    throw DegenerateLabelError("KS needs both classes with positive weight");
  }

  auto order = order_by_score(samples);
  double cum_pos = 0, cum_neg = 0, best = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() &&
           samples[order[j]].score == samples[order[i]].score) {
      const auto& s = samples[order[j]];
      (s.label ? cum_pos : cum_neg) += s.weight;
      ++j;
    }
    best = std::max(best, std::abs(cum_pos / w_pos - cum_neg / w_neg));
    i = j;
  }
  return best;
}

double psi(std::span<const double> expected, std::span<const double> actual) {
  if (expected.size() != actual.size()) {
    throw ContractError("PSI bin counts differ: " + std::to_string(expected.size()) +
                        " vs " + std::to_string(actual.size()));
  }
  constexpr double kFloor = 1e-6;
  double total = 0;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    double e = std::max(expected[b], kFloor);
    double a = std::max(actual[b], kFloor);
    total += (actual[b] - expected[b]) * std::log(a / e);
  }
  return total;
}

double psi_from_scores(std::span<const double> expected_scores,
                       std::span<const double> actual_scores) {
  if (expected_scores.empty() || actual_scores.empty()) {
    throw ContractError("PSI needs nonempty score samples");
  }
  constexpr int kBins = 10;
  std::vector<double> sorted(expected_scores.begin(), expected_scores.end());
  std::sort(sorted.begin(), sorted.end());
  // Equal-frequency cut points on the expected sample; first/last bins open.
  std::vector<double> edges;
  for (int b = 1; b < kBins; ++b) {
    double pos = static_cast<double>(b) / kBins * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    double v = lo + 1 < sorted.size() ? sorted[lo] * (1 - frac) + sorted[lo + 1] * frac
                                      : sorted[lo];
    edges.push_back(v);
  }
  auto histogram = [&](std::span<const double> scores) {
    std::vector<double> h(kBins, 0.0);
    for (double s : scores) {
      std::size_t b = std::upper_bound(edges.begin(), edges.end(), s) - edges.begin();
      h[b] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(scores.size());
    return h;
  };
  auto e = histogram(expected_scores);
  auto a = histogram(actual_scores);
  return psi(e, a);
}

}  // namespace driftgate
