#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "selmallows/core.hpp"
#include "selmallows/rng.hpp"

namespace selmallows {

// Per-ordered-pair tallies of a profile.
//   appear(i, j): samples containing both i and j (symmetric)
//   wins(i, j):   samples in which i precedes j
class PairwiseCounts {
 public:
  PairwiseCounts() = default;
  explicit PairwiseCounts(std::size_t n) : n_(n), appear_(n * n, 0), wins_(n * n, 0) {}

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::uint64_t appear(Item i, Item j) const { return appear_[idx(i, j)]; }
  [[nodiscard]] std::uint64_t wins(Item i, Item j) const { return wins_[idx(i, j)]; }

  void add_ranking(const Ranking& pi) {
    const auto& v = pi.items();
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = a + 1; b < v.size(); ++b) {
        ++wins_[idx(v[a], v[b])];
        ++appear_[idx(v[a], v[b])];
        ++appear_[idx(v[b], v[a])];
      }
    }
  }

  // Records `count` samples in which i precedes j.
  void add_wins(Item i, Item j, std::uint64_t count = 1) {
    if (i == j) throw std::invalid_argument("add_wins: i == j");
    wins_[idx(i, j)] += count;
    appear_[idx(i, j)] += count;
    appear_[idx(j, i)] += count;
  }

  PairwiseCounts& operator+=(const PairwiseCounts& o) {
    if (o.n_ != n_) throw std::invalid_argument("PairwiseCounts: size mismatch");
    for (std::size_t k = 0; k < appear_.size(); ++k) {
      appear_[k] += o.appear_[k];
      wins_[k] += o.wins_[k];
    }
    return *this;
  }

  friend bool operator==(const PairwiseCounts&, const PairwiseCounts&) = default;

 private:
  [[nodiscard]] std::size_t idx(Item i, Item j) const { return static_cast<std::size_t>(i) * n_ + j; }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> appear_;
  std::vector<std::uint64_t> wins_;
};

inline PairwiseCounts accumulate_counts(const SampleProfile& profile) {
  PairwiseCounts counts(profile.n());
  for (const auto& pi : profile.rankings()) counts.add_ranking(pi);
  return counts;
}

struct PosEstResult {
  Ranking ranking;
  // Number of alternatives that precede i in at least half of their joint samples.
  std::vector<std::size_t> raw_scores;
  // Alternatives sharing a raw score (groups of two or more), in score order.
  std::vector<std::vector<Item>> tie_groups;
  // Pairs never observed together; both members were credited.
  std::vector<std::pair<Item, Item>> zero_appearance_pairs;
  // Alternatives absent from every sample; their raw score is n-1.
  std::vector<Item> absent_alternatives;
};

// Positional estimator over pairwise tallies.
//
// raw_score(i) = |{ j != i : 2 * wins(j, i) >= appear(i, j) }|. A pair split
// exactly in half, or never observed, credits both alternatives. Alternatives
// are sorted by raw score ascending; each tie group is put in a uniformly
// random order drawn from rng.
inline PosEstResult positional_estimator(const PairwiseCounts& counts, Rng& rng) {
  const std::size_t n = counts.n();
  PosEstResult res;
  res.raw_scores.assign(n, 0);
  std::vector<bool> seen(n, false);
  for (Item i = 0; i < n; ++i) {
    for (Item j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto both = counts.appear(i, j);
      if (both > 0) seen[i] = true;
      if (2 * counts.wins(j, i) >= both) ++res.raw_scores[i];
      if (both == 0 && i < j) res.zero_appearance_pairs.emplace_back(i, j);
    }
  }
  for (Item i = 0; i < n; ++i)
    if (!seen[i]) res.absent_alternatives.push_back(i);

  std::vector<std::vector<Item>> by_score(n == 0 ? 0 : n);
  for (Item i = 0; i < n; ++i) by_score[res.raw_scores[i]].push_back(i);
  std::vector<Item> order;
  order.reserve(n);
  for (auto& group : by_score) {
    if (group.size() > 1) {
      res.tie_groups.push_back(group);
      rng.shuffle(group);
    }
    order.insert(order.end(), group.begin(), group.end());
  }
  res.ranking = Ranking(std::move(order));
  return res;
}

inline PosEstResult positional_estimator(const SampleProfile& profile, Rng& rng) {
  if (profile.empty()) throw std::invalid_argument("positional_estimator: empty profile");
  return positional_estimator(accumulate_counts(profile), rng);
}

// Sum over ordered pairs (i before j in pi) of wins(i, j).
inline std::uint64_t score(const Ranking& pi, const PairwiseCounts& counts) {
  if (!pi.is_complete(counts.n())) throw std::invalid_argument("score: ranking must be complete over n");
  std::uint64_t s = 0;
  const auto& v = pi.items();
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b) s += counts.wins(v[a], v[b]);
  return s;
}

// Log-probability of the profile under center pi and spread beta. The
// distance total is accumulated as an integer first, so rankings with equal
// total distance get bit-identical values.
inline double log_likelihood(const Ranking& pi, const SampleProfile& profile, double beta) {
  if (!pi.is_complete(profile.n())) throw std::invalid_argument("log_likelihood: ranking must be complete over n");
  if (!(beta > 0.0)) throw std::invalid_argument("log_likelihood: beta must be positive");
  std::uint64_t distance = 0;
  double log_norm = 0.0;
  for (const auto& sample : profile.rankings()) {
    distance += kendall_tau_incomplete(pi, sample);
    log_norm += log_partition_function(sample.size(), beta);
  }
  return -beta * static_cast<double>(distance) - log_norm;
}

inline constexpr std::size_t kBruteForceMaxN = 10;

// Exact score maximizer. Ties go to the lexicographically smallest ranking.
inline Ranking brute_force_mle(const PairwiseCounts& counts,
                               const std::optional<std::vector<Ranking>>& restrict_to = std::nullopt) {
  if (restrict_to) {
    if (restrict_to->empty()) throw std::invalid_argument("brute_force_mle: empty feasible set");
    std::vector<Ranking> sorted = *restrict_to;
    std::sort(sorted.begin(), sorted.end());
    const Ranking* best = &sorted.front();
    std::uint64_t best_score = score(*best, counts);
    for (const auto& pi : sorted) {
      const auto s = score(pi, counts);
      if (s > best_score) {
        best_score = s;
        best = &pi;
      }
    }
    return *best;
  }
  const std::size_t n = counts.n();
  if (n > kBruteForceMaxN) {
    throw std::invalid_argument("brute_force_mle: n = " + std::to_string(n) + " exceeds " +
                                std::to_string(kBruteForceMaxN) + " without a feasible set");
  }
  std::vector<Item> perm(n);
  std::iota(perm.begin(), perm.end(), Item{0});
  std::vector<Item> best = perm;
  std::uint64_t best_score = 0;
  bool first = true;
  do {
    std::uint64_t s = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) s += counts.wins(perm[a], perm[b]);
    if (first || s > best_score) {
      best_score = s;
      best = perm;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Ranking(std::move(best));
}

inline Ranking brute_force_mle(const SampleProfile& profile,
                               const std::optional<std::vector<Ranking>>& restrict_to = std::nullopt) {
  return brute_force_mle(accumulate_counts(profile), restrict_to);
}

inline Ranking top_k(const Ranking& pi, std::size_t k) {
  if (k < 1 || k > pi.size()) throw std::invalid_argument("top_k: k out of range");
  return Ranking(std::vector<Item>(pi.items().begin(), pi.items().begin() + static_cast<std::ptrdiff_t>(k)));
}

}  // namespace selmallows
