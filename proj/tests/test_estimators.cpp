#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "selmallows/estimators.hpp"
#include "selmallows/sampling.hpp"
#include "test_constants.hpp"

using namespace selmallows;

namespace {

Ranking R(std::vector<Item> v) { return Ranking(std::move(v)); }

SampleProfile complete_profile(std::size_t n, std::vector<Ranking> rs) {
  std::vector<std::vector<Item>> sets(rs.size(), std::vector<Item>());
  for (auto& s : sets)
    for (Item i = 0; i < n; ++i) s.push_back(i);
  return SampleProfile(SelectionSequence(n, sets), std::move(rs));
}

SampleProfile random_profile(std::size_t n, std::size_t r, double beta, Rng& rng) {
  SelectionSpec spec{SelectionKind::bernoulli_random, n, 0.36};
  const auto sel = generate_selection(spec, r, rng.split(1));
  return sample_profile(MallowsParams(random_ranking(n, rng), beta), sel, rng.split(2));
}

}  // namespace

TEST(AccumulateCounts, Examples) {
  const SampleProfile empty(SelectionSequence(3, {}), {});
  EXPECT_EQ(accumulate_counts(empty), PairwiseCounts(3));

  const SampleProfile two(SelectionSequence(2, {{0, 1}, {0, 1}}), {R({0, 1}), R({1, 0})});
  const auto c = accumulate_counts(two);
  EXPECT_EQ(c.appear(0, 1), 2U);
  EXPECT_EQ(c.wins(0, 1), 1U);
  EXPECT_EQ(c.wins(1, 0), 1U);
}

TEST(AccumulateCounts, MatchesDenseRecount) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto prof = random_profile(4 + trial % 5, 3 + trial % 7, 0.6, rng);
    const auto c = accumulate_counts(prof);
    const auto d = oracle::recount(prof);
    std::uint64_t total = 0, expected_pairs = 0;
    for (Item i = 0; i < prof.n(); ++i) {
      EXPECT_EQ(c.wins(i, i), 0U);
      EXPECT_EQ(c.appear(i, i), 0U);
      for (Item j = 0; j < prof.n(); ++j) {
        EXPECT_EQ(c.appear(i, j), d.appear[i][j]);
        EXPECT_EQ(c.wins(i, j), d.wins[i][j]);
        EXPECT_EQ(c.appear(i, j), c.appear(j, i));
        if (i != j) EXPECT_EQ(c.wins(i, j) + c.wins(j, i), c.appear(i, j));
        if (i < j) total += c.wins(i, j) + c.wins(j, i);
      }
    }
    for (const auto& pi : prof.rankings()) expected_pairs += pi.size() * (pi.size() - 1) / 2;
    EXPECT_EQ(total, expected_pairs);
  }
}

TEST(PositionalEstimator, UnanimousProfile) {
  const Ranking pi0 = R({3, 0, 4, 1, 2});
  Rng rng(1);
  const auto res = positional_estimator(complete_profile(5, {pi0, pi0, pi0}), rng);
  EXPECT_EQ(res.ranking, pi0);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(res.raw_scores[pi0[t]], t);
  EXPECT_TRUE(res.tie_groups.empty());
}

TEST(PositionalEstimator, HandCountedMajorities) {
  // Pair (0,1): 0 first twice of three. Pairs with 2: 2 last in all three.
  Rng rng(1);
  const auto res = positional_estimator(complete_profile(3, {R({0, 1, 2}), R({0, 1, 2}), R({1, 0, 2})}), rng);
  EXPECT_EQ(res.raw_scores, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(res.ranking, R({0, 1, 2}));
}

TEST(PositionalEstimator, SingleDecisiveComparison) {
  Rng rng(1);
  const auto res = positional_estimator(complete_profile(2, {R({1, 0})}), rng);
  EXPECT_EQ(res.raw_scores, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(res.ranking, R({1, 0}));
}

TEST(PositionalEstimator, EvenSplitCreditsBoth) {
  const auto prof = complete_profile(2, {R({0, 1}), R({1, 0})});
  std::set<Ranking> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    Rng rng(seed);
    const auto res = positional_estimator(prof, rng);
    EXPECT_EQ(res.raw_scores, (std::vector<std::size_t>{1, 1}));
    ASSERT_EQ(res.tie_groups.size(), 1U);
    seen.insert(res.ranking);
  }
  EXPECT_EQ(seen.size(), 2U);
}

TEST(PositionalEstimator, UnobservedPairsAndAbsentAlternatives) {
  // Alternative 3 never appears; pair (0,2) is never compared.
  const SampleProfile prof(SelectionSequence(4, {{0, 1}, {1, 2}}), {R({0, 1}), R({1, 2})});
  Rng rng(4);
  const auto res = positional_estimator(prof, rng);
  EXPECT_EQ(res.absent_alternatives, (std::vector<Item>{3}));
  EXPECT_EQ(res.raw_scores[3], 3U);
  EXPECT_EQ(res.raw_scores, (std::vector<std::size_t>{2, 2, 3, 3}));
  const std::vector<std::pair<Item, Item>> zero{{0, 2}, {0, 3}, {1, 3}, {2, 3}};
  EXPECT_EQ(res.zero_appearance_pairs, zero);
}

TEST(PositionalEstimator, TieBreakIsUniform) {
  // Three alternatives in a Condorcet cycle all score 1.
  PairwiseCounts c(3);
  c.add_wins(0, 1);
  c.add_wins(1, 2);
  c.add_wins(2, 0);
  std::map<std::vector<Item>, int> freq;
  const int draws = 60000;
  for (int s = 0; s < draws; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    ++freq[positional_estimator(c, rng).ranking.items()];
  }
  ASSERT_EQ(freq.size(), 6U);
  for (auto& [k, v] : freq) EXPECT_NEAR(v / static_cast<double>(draws), 1.0 / 6, 4 * std::sqrt(5.0 / 36 / draws));
}

TEST(PositionalEstimator, RelabelingEquivariance) {
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 100; ++trial) {
    const std::size_t n = 7;
    const auto prof = random_profile(n, 12, 1.0, rng);
    Rng t1(5);
    const auto a = positional_estimator(prof, t1);
    if (!a.tie_groups.empty()) continue;
    const Ranking rho = random_ranking(n, rng);
    std::vector<Ranking> moved;
    std::vector<std::vector<Item>> sets;
    for (const auto& pi : prof.rankings()) {
      std::vector<Item> v;
      for (auto it : pi.items()) v.push_back(rho[it]);
      sets.push_back(v);
      moved.emplace_back(v);
    }
    Rng t2(5);
    const auto b = positional_estimator(SampleProfile(SelectionSequence(n, sets), moved), t2);
    std::vector<Item> expected;
    for (auto it : a.ranking.items()) expected.push_back(rho[it]);
    EXPECT_EQ(b.ranking, Ranking(expected));
    ++checked;
  }
  EXPECT_GE(checked, 50);
}

TEST(PositionalEstimator, DeviationRegressionGuard) {
  using namespace test_constants;
  int exceed = 0;
  for (int trial = 0; trial < kDeviationTrials; ++trial) {
    Rng rng = Rng(kDeviationSeed).split(static_cast<std::uint64_t>(trial));
    const Ranking pi0 = random_ranking(20, rng);
    const auto sel = generate_selection({SelectionKind::mixed_pfrequent, 20, 0.5}, 60, rng.split(1));
    const auto prof = sample_profile(MallowsParams(pi0, 2.0), sel, rng.split(2));
    const auto est = positional_estimator(prof, rng).ranking;
    if (pointwise_distance(est, pi0) > kDeviationThreshold) ++exceed;
  }
  EXPECT_LE(exceed, kDeviationTrials * kDeviationMaxFraction);
}

TEST(Score, Examples) {
  const PairwiseCounts zero(4);
  EXPECT_EQ(score(R({2, 0, 3, 1}), zero), 0U);
  PairwiseCounts c(2);
  c.add_wins(0, 1, 3);
  c.add_wins(1, 0, 1);
  EXPECT_EQ(score(R({0, 1}), c), 3U);
  EXPECT_EQ(score(R({1, 0}), c), 1U);
}

TEST(Score, ReversalComplement) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = oracle::random_counts(6, 9, rng);
    std::uint64_t total = 0;
    for (Item i = 0; i < 6; ++i)
      for (Item j = i + 1; j < 6; ++j) total += c.appear(i, j);
    const Ranking pi = random_ranking(6, rng);
    EXPECT_EQ(score(pi, c) + score(pi.reversed(), c), total);
  }
}

TEST(LogLikelihood, ZeroDistanceProfile) {
  const Ranking pi = R({2, 0, 3, 1});
  const SelectionSequence sel(4, {{0, 1, 2, 3}, {0, 3}, {1, 2, 3}});
  std::vector<Ranking> rs;
  for (const auto& s : sel.sets()) rs.push_back(restrict(pi, s));
  const double beta = 0.8;
  const double expected = -(log_partition_function(4, beta) + log_partition_function(2, beta) +
                            log_partition_function(3, beta));
  EXPECT_NEAR(log_likelihood(pi, SampleProfile(sel, rs), beta), expected, 1e-12);
}

TEST(LogLikelihood, OneInvertedPairCostsBeta) {
  const SelectionSequence sel(3, {{0, 1, 2}, {0, 2}});
  const SampleProfile prof(sel, {R({0, 1, 2}), R({2, 0})});
  const double beta = 1.7;
  // (0,1,2) vs (0,2,1): only the pair (1,2) differs, and it appears in sample 0.
  EXPECT_NEAR(log_likelihood(R({0, 1, 2}), prof, beta) - log_likelihood(R({0, 2, 1}), prof, beta), beta, 1e-12);
}

TEST(LogLikelihood, ArgmaxMatchesScoreArgmax) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto prof = random_profile(5, 6, 0.4, rng);
    const auto counts = accumulate_counts(prof);
    double best_ll = -1e300;
    std::uint64_t best_score = 0;
    for (const auto& p : oracle::all_permutations({0, 1, 2, 3, 4})) {
      best_ll = std::max(best_ll, log_likelihood(Ranking(p), prof, 0.9));
      best_score = std::max(best_score, score(Ranking(p), counts));
    }
    const Ranking mle = brute_force_mle(prof);
    EXPECT_EQ(score(mle, counts), best_score);
    EXPECT_EQ(log_likelihood(mle, prof, 0.9), best_ll);
  }
}

TEST(BruteForceMle, Examples) {
  const Ranking pi0 = R({1, 3, 0, 2});
  EXPECT_EQ(brute_force_mle(complete_profile(4, {pi0, pi0})), pi0);

  // Crafted counts: a strong chain 2 > 0 > 3 > 1, so the maximizer is unique.
  PairwiseCounts c(4);
  const std::vector<Item> chain{2, 0, 3, 1};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) c.add_wins(chain[a], chain[b], 5 - (b - a));
  c.add_wins(1, 2, 1);
  EXPECT_EQ(brute_force_mle(c), Ranking(chain));

  EXPECT_EQ(brute_force_mle(c, std::vector<Ranking>{pi0}), pi0);
  EXPECT_THROW(brute_force_mle(PairwiseCounts(11)), std::invalid_argument);
  EXPECT_NO_THROW(brute_force_mle(PairwiseCounts(11), std::vector<Ranking>{Ranking::identity(11)}));
}

TEST(BruteForceMle, TiesGoToLexicographicallySmallest) {
  EXPECT_EQ(brute_force_mle(PairwiseCounts(4)), Ranking::identity(4));
}

TEST(TopK, Examples) {
  const Ranking pi = R({4, 2, 0, 3, 1});
  EXPECT_EQ(top_k(pi, 5), pi);
  EXPECT_EQ(top_k(pi, 2), R({4, 2}));
  EXPECT_THROW(top_k(pi, 0), std::invalid_argument);
  EXPECT_THROW(top_k(pi, 6), std::invalid_argument);
}
