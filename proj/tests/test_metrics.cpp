#include <doctest.h>

#include <cmath>
#include <vector>

#include "driftgate/errors.hpp"
#include "driftgate/metrics.hpp"
#include "driftgate/rng.hpp"

using namespace driftgate;

namespace {

// O(n^2) pairwise oracle, ties counted 1/2. Kept independent of the
// rank-based implementation on purpose.
double auc_bruteforce(const std::vector<ScoredSample>& samples) {
  double num = 0, w_pos = 0, w_neg = 0;
  for (const auto& p : samples) {
    if (!p.label) continue;
    w_pos += p.weight;
    for (const auto& n : samples) {
      if (n.label) continue;
      if (p.score > n.score) num += p.weight * n.weight;
      else if (p.score == n.score) num += 0.5 * p.weight * n.weight;
    }
  }
  for (const auto& n : samples) {
    if (!n.label) w_neg += n.weight;
  }
  return num / (w_pos * w_neg);
}

std::vector<ScoredSample> make_samples(const std::vector<int>& labels,
                                       const std::vector<double>& scores) {
  std::vector<ScoredSample> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({labels[i], scores[i], 1.0});
  return out;
}

}  // namespace

TEST_CASE("auc: worked example and degenerate cases") {
  auto samples = make_samples({0, 0, 1, 1}, {0.1, 0.4, 0.35, 0.8});
  CHECK(auc(samples) == 0.75);
  CHECK(auc(samples) == auc_bruteforce(samples));

  CHECK(auc(make_samples({0, 1, 0, 1}, {3, 3, 3, 3})) == 0.5);
  CHECK(auc(make_samples({0, 0, 1, 1}, {1, 2, 3, 4})) == 1.0);
  CHECK(auc(make_samples({1, 1, 0, 0}, {1, 2, 3, 4})) == 0.0);

  CHECK_THROWS_AS(auc(make_samples({1, 1}, {0.2, 0.4})), DegenerateLabelError);
  CHECK_THROWS_AS(auc(make_samples({}, {})), DegenerateLabelError);
}

TEST_CASE("auc: equals pairwise brute force exactly on random tied instances") {
  Rng rng(17);
  for (int round = 0; round < 60; ++round) {
    std::size_t n = 2 + rng.uniform_index(120);
    std::vector<ScoredSample> samples;
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      int label = rng.bernoulli(0.4) ? 1 : 0;
      (label ? has1 : has0) = true;
      // few distinct scores -> many ties
      double score = static_cast<double>(rng.uniform_index(8)) / 4.0;
      samples.push_back({label, score, 1.0});
    }
    if (!has0 || !has1) continue;
    CHECK(auc(samples) == auc_bruteforce(samples));
  }
}

TEST_CASE("auc: weighted equals brute force with integer weights") {
  Rng rng(99);
  for (int round = 0; round < 30; ++round) {
    std::vector<ScoredSample> samples;
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < 40; ++i) {
      int label = rng.bernoulli(0.5) ? 1 : 0;
      (label ? has1 : has0) = true;
      samples.push_back({label, static_cast<double>(rng.uniform_index(6)),
                         static_cast<double>(1 + rng.uniform_index(4))});
    }
    if (!has0 || !has1) continue;
    CHECK(auc(samples) == auc_bruteforce(samples));
  }
}

TEST_CASE("auc: complement and monotone-transform invariance") {
  Rng rng(5);
  for (int round = 0; round < 25; ++round) {
    std::vector<ScoredSample> samples, negated;
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < 60; ++i) {
      int label = rng.bernoulli(0.3) ? 1 : 0;
      (label ? has1 : has0) = true;
      double score = static_cast<double>(rng.uniform_index(12));
      samples.push_back({label, score, 1.0});
      negated.push_back({label, -score, 1.0});
    }
    if (!has0 || !has1) continue;
    CHECK(auc(samples) + auc(negated) == doctest::Approx(1.0).epsilon(1e-12));

    // random strictly increasing map: a*x + b then an odd cubic
    double a = 0.5 + rng.uniform01() * 3.0;
    double b = rng.normal();
    std::vector<ScoredSample> mapped = samples;
    for (auto& s : mapped) {
      double v = a * s.score + b;
      s.score = v * v * v + 2.0 * v;
    }
    CHECK(auc(mapped) == doctest::Approx(auc(samples)).epsilon(1e-12));
  }
}

TEST_CASE("ks: hand cases") {
  CHECK(ks_statistic(make_samples({0, 1}, {0.2, 0.8})) == 1.0);
  CHECK(ks_statistic(make_samples({0, 0, 1, 1}, {0.1, 0.6, 0.4, 0.9})) == 0.5);
  CHECK(ks_statistic(make_samples({0, 1, 0, 1}, {0.3, 0.3, 0.7, 0.7})) == 0.0);
  CHECK_THROWS_AS(ks_statistic(make_samples({0, 0}, {0.1, 0.2})), DegenerateLabelError);
}

TEST_CASE("ks: stays in [0,1] on random data") {
  Rng rng(7);
  for (int round = 0; round < 20; ++round) {
    std::vector<ScoredSample> samples;
    for (int i = 0; i < 50; ++i) {
      samples.push_back({i % 2, rng.normal(), 1.0});
    }
    double ks = ks_statistic(samples);
    CHECK(ks >= 0.0);
    CHECK(ks <= 1.0);
  }
}

TEST_CASE("psi: identity, worked example, empty-bin floor") {
  std::vector<double> e{0.5, 0.5};
  CHECK(psi(e, e) == 0.0);

  std::vector<double> a{0.25, 0.75};
  double expected = (0.25 - 0.5) * std::log(0.25 / 0.5) + (0.75 - 0.5) * std::log(0.75 / 0.5);
  CHECK(psi(e, a) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(psi(e, a) == doctest::Approx(0.2747).epsilon(1e-3));

  std::vector<double> with_empty{0.0, 1.0};
  CHECK(std::isfinite(psi(e, with_empty)));
  CHECK(psi(e, with_empty) >= 0.0);

  CHECK_THROWS_AS(psi(std::vector<double>{1.0}, a), ContractError);
}

TEST_CASE("psi: role order matters when bins come from the expected sample") {
  // The bare histogram formula (a-e)ln(a/e) is symmetric in (e,a); the
  // score-level wrapper is not, because bin edges follow the expected sample.
  std::vector<double> e{0.7, 0.2, 0.1};
  std::vector<double> a{0.1, 0.2, 0.7};
  CHECK(psi(e, a) == psi(a, e));

  Rng rng(31);
  std::vector<double> base, skewed;
  for (int i = 0; i < 400; ++i) {
    base.push_back(rng.normal());
    skewed.push_back(std::exp(rng.normal()));
  }
  CHECK(psi_from_scores(base, skewed) != psi_from_scores(skewed, base));
}

TEST_CASE("psi_from_scores: zero on identical samples, positive under shift") {
  Rng rng(3);
  std::vector<double> expected, shifted;
  for (int i = 0; i < 500; ++i) {
    double v = rng.normal();
    expected.push_back(v);
    shifted.push_back(v + 1.0);
  }
  CHECK(psi_from_scores(expected, expected) == 0.0);
  CHECK(psi_from_scores(expected, shifted) > 0.1);
}
