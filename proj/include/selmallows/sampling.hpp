#pragma once

// Exact selective Mallows sampling and selection-sequence generators.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selmallows/core.hpp"
#include "selmallows/rng.hpp"

namespace selmallows {

// Frozen insertion CDFs for the repeated-insertion sampler.
//
// Step t inserts the (t+1)-th item of the center d places above the bottom of
// the t items already placed, d in [0, t], with probability proportional to
// e^{-beta d}. The CDF of each step is computed once in double precision and
// frozen to 64-bit thresholds; a draw compares one 64-bit word against them.
class InsertionTable {
 public:
  InsertionTable(double beta, std::size_t max_size) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
    thresholds_.resize(max_size);
    for (std::size_t t = 0; t < max_size; ++t) {
      auto& row = thresholds_[t];
      row.resize(t);
      const double denom = std::expm1(-beta * static_cast<double>(t + 1));
      for (std::size_t d = 0; d < t; ++d) {
        const double cdf = std::expm1(-beta * static_cast<double>(d + 1)) / denom;
        row[d] = probability_threshold(cdf);
      }
    }
  }

  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] std::size_t max_size() const { return thresholds_.size(); }

  // Displacement from the bottom for insertion step t.
  std::size_t draw(std::size_t t, Rng& rng) const {
    const auto& row = thresholds_[t];
    const std::uint64_t u = rng();
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (u < row[d]) return d;
    }
    return t;
  }

  // Samples a ranking of center's items from Mallows(center, beta).
  [[nodiscard]] Ranking sample(const Ranking& center, Rng& rng) const {
    if (center.size() > thresholds_.size()) throw std::invalid_argument("insertion table too small");
    std::vector<Item> out;
    out.reserve(center.size());
    for (std::size_t t = 0; t < center.size(); ++t) {
      const std::size_t d = draw(t, rng);
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(t - d), center[t]);
    }
    return Ranking(std::move(out));
  }

 private:
  double beta_;
  std::vector<std::vector<std::uint64_t>> thresholds_;
};

inline Ranking sample_mallows(const Ranking& center, double beta, Rng& rng) {
  return InsertionTable(beta, center.size()).sample(center, rng);
}

// Position l of the profile draws from rng.split(l), so the profile does not
// depend on the order in which positions are generated.
inline SampleProfile sample_profile(const MallowsParams& params, const SelectionSequence& selection,
                                    const InsertionTable& table, const Rng& rng) {
  if (selection.n() != params.n()) throw std::invalid_argument("selection and center disagree on n");
  std::vector<Ranking> rankings;
  rankings.reserve(selection.size());
  for (std::size_t l = 0; l < selection.size(); ++l) {
    Rng sub = rng.split(l);
    rankings.push_back(table.sample(restrict(params.center, selection[l]), sub));
  }
  return SampleProfile(selection, std::move(rankings));
}

inline SampleProfile sample_profile(const MallowsParams& params, const SelectionSequence& selection,
                                    const Rng& rng) {
  return sample_profile(params, selection, InsertionTable(params.beta, params.n()), rng);
}

inline Ranking random_ranking(std::size_t n, Rng& rng) {
  std::vector<Item> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Item>(i);
  rng.shuffle(v);
  return Ranking(std::move(v));
}

enum class SelectionKind { complete, pairwise, mixed_pfrequent, bernoulli_random, adversarial_matching, explicit_sets };

inline std::string_view to_string(SelectionKind k) {
  switch (k) {
    case SelectionKind::complete: return "complete";
    case SelectionKind::pairwise: return "pairwise";
    case SelectionKind::mixed_pfrequent: return "mixed_pfrequent";
    case SelectionKind::bernoulli_random: return "bernoulli_random";
    case SelectionKind::adversarial_matching: return "adversarial_matching";
    case SelectionKind::explicit_sets: return "explicit";
  }
  return "?";
}

inline SelectionKind parse_selection_kind(std::string_view s) {
  for (auto k : {SelectionKind::complete, SelectionKind::pairwise, SelectionKind::mixed_pfrequent,
                 SelectionKind::bernoulli_random, SelectionKind::adversarial_matching, SelectionKind::explicit_sets}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown selection kind '" + std::string(s) + "'");
}

struct SelectionSpec {
  SelectionKind kind = SelectionKind::complete;
  std::size_t n = 0;
  double p = 1.0;
  // Per-alternative inclusion probability for bernoulli_random; 0 means sqrt(p).
  double q = 0.0;
  std::vector<std::vector<Item>> explicit_sets;

  [[nodiscard]] double inclusion_probability() const { return q > 0.0 ? q : std::sqrt(p); }
};

// ceil(p * r), tolerant of p = 1/k round-off.
inline std::size_t full_set_count(double p, std::size_t r) {
  const double pr = p * static_cast<double>(r);
  return static_cast<std::size_t>(std::ceil(pr - 1e-9));
}

// Member t (1-based, t in [1, n/2]) of the edge-disjoint perfect matching
// family: odd alternative 2s-1 is paired with (2t + 2s - 2) mod n, both
// 1-based with 0 read as n. Returned 0-based.
inline std::vector<std::pair<Item, Item>> perfect_matching(std::size_t n, std::size_t t) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("perfect_matching: n must be even and >= 2");
  if (t < 1 || t > n / 2) throw std::invalid_argument("perfect_matching: t out of range");
  std::vector<std::pair<Item, Item>> out;
  out.reserve(n / 2);
  for (std::size_t s = 1; s <= n / 2; ++s) {
    const std::size_t a = 2 * s - 1;
    std::size_t b = (2 * t + 2 * s - 2) % n;
    if (b == 0) b = n;
    out.emplace_back(static_cast<Item>(a - 1), static_cast<Item>(b - 1));
  }
  return out;
}

// Uniformly random ranking in which every pair of the matching is adjacent.
inline Ranking plant_adjacent_pairs(std::size_t n, const std::vector<std::pair<Item, Item>>& matching, Rng& rng) {
  std::vector<std::pair<Item, Item>> blocks = matching;
  rng.shuffle(blocks);
  std::vector<Item> v;
  v.reserve(n);
  for (auto [a, b] : blocks) {
    if (rng.below(2) == 1) std::swap(a, b);
    v.push_back(a);
    v.push_back(b);
  }
  if (v.size() != n) throw std::invalid_argument("matching does not cover all alternatives");
  return Ranking(std::move(v));
}

namespace detail {

inline std::vector<Item> all_items(std::size_t n) {
  std::vector<Item> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Item>(i);
  return v;
}

inline std::vector<std::pair<Item, Item>> all_pairs(std::size_t n) {
  std::vector<std::pair<Item, Item>> out;
  for (Item i = 0; i < n; ++i)
    for (Item j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

}  // namespace detail

inline void validate(const SelectionSpec& spec) {
  if (!(spec.p > 0.0 && spec.p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  if (spec.kind != SelectionKind::explicit_sets && spec.n < 2) {
    throw std::invalid_argument("selection needs n >= 2");
  }
  if (spec.kind == SelectionKind::bernoulli_random) {
    const double q = spec.inclusion_probability();
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("inclusion probability q must lie in (0, 1]");
    if (q * q < spec.p - 1e-12) throw std::invalid_argument("bernoulli_random requires q^2 >= p");
  }
  if (spec.kind == SelectionKind::adversarial_matching && spec.n % 2 != 0) {
    throw std::invalid_argument("adversarial_matching requires even n");
  }
}

inline SelectionSequence generate_selection(const SelectionSpec& spec, std::size_t r, const Rng& rng) {
  validate(spec);
  if (r == 0 && spec.kind != SelectionKind::explicit_sets) throw std::invalid_argument("r must be >= 1");
  const std::size_t n = spec.n;
  std::vector<std::vector<Item>> sets;
  sets.reserve(r);

  auto add_full_then_pairs = [&](const std::vector<std::pair<Item, Item>>& pool) {
    const std::size_t full = full_set_count(spec.p, r);
    if (spec.p * static_cast<double>(r) < 1.0 - 1e-9) {
      throw std::invalid_argument("infeasible selection: p * r = " + std::to_string(spec.p * static_cast<double>(r)) +
                                  " < 1");
    }
    for (std::size_t l = 0; l < full; ++l) sets.push_back(detail::all_items(n));
    for (std::size_t l = full; l < r; ++l) {
      const auto& [a, b] = pool[(l - full) % pool.size()];
      sets.push_back({a, b});
    }
  };

  switch (spec.kind) {
    case SelectionKind::complete:
      for (std::size_t l = 0; l < r; ++l) sets.push_back(detail::all_items(n));
      break;
    case SelectionKind::pairwise: {
      const auto pairs = detail::all_pairs(n);
      for (std::size_t l = 0; l < r; ++l) sets.push_back({pairs[l % pairs.size()].first, pairs[l % pairs.size()].second});
      break;
    }
    case SelectionKind::mixed_pfrequent:
      add_full_then_pairs(detail::all_pairs(n));
      break;
    case SelectionKind::adversarial_matching: {
      // Small sets come from matchings 2..n/2, so the pairs of matching 1 are
      // only ever compared inside the full sets.
      std::vector<std::pair<Item, Item>> pool;
      for (std::size_t t = 2; t <= n / 2; ++t) {
        auto m = perfect_matching(n, t);
        pool.insert(pool.end(), m.begin(), m.end());
      }
      if (pool.empty()) pool = perfect_matching(n, 1);
      add_full_then_pairs(pool);
      break;
    }
    case SelectionKind::bernoulli_random: {
      const std::uint64_t threshold = probability_threshold(spec.inclusion_probability());
      for (std::size_t l = 0; l < r; ++l) {
        Rng sub = rng.split(l);
        std::vector<Item> s;
        do {
          s.clear();
          for (Item i = 0; i < n; ++i) {
            if (sub.bernoulli_fixed(threshold)) s.push_back(i);
          }
        } while (s.size() < 2);
        sets.push_back(std::move(s));
      }
      break;
    }
    case SelectionKind::explicit_sets: {
      std::size_t hi = spec.n;
      for (const auto& s : spec.explicit_sets)
        for (auto i : s) hi = std::max<std::size_t>(hi, static_cast<std::size_t>(i) + 1);
      return SelectionSequence(hi, spec.explicit_sets);
    }
  }
  return SelectionSequence(n, std::move(sets));
}

struct PFrequencyReport {
  bool ok = false;
  std::size_t n = 0;
  std::size_t r = 0;
  // counts[i * n + j]: number of sets containing both i and j (0 on the diagonal).
  std::vector<std::uint64_t> counts;
  std::uint64_t min_count = 0;
  std::pair<Item, Item> worst_pair{0, 0};

  [[nodiscard]] std::uint64_t count(Item i, Item j) const { return counts[static_cast<std::size_t>(i) * n + j]; }
};

// Checks that every pair co-appears in at least a p fraction of the sets.
inline PFrequencyReport verify_p_frequent(const SelectionSequence& selection, double p) {
  PFrequencyReport rep;
  rep.n = selection.n();
  rep.r = selection.size();
  rep.counts.assign(rep.n * rep.n, 0);
  for (const auto& s : selection.sets()) {
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        ++rep.counts[s[a] * rep.n + s[b]];
        ++rep.counts[s[b] * rep.n + s[a]];
      }
  }
  bool first = true;
  for (Item i = 0; i < rep.n; ++i)
    for (Item j = i + 1; j < rep.n; ++j) {
      const auto c = rep.count(i, j);
      if (first || c < rep.min_count) {
        rep.min_count = c;
        rep.worst_pair = {i, j};
        first = false;
      }
    }
  if (rep.n < 2) {
    rep.ok = true;
  } else {
    rep.ok = rep.r > 0 && static_cast<double>(rep.min_count) + 1e-9 >= p * static_cast<double>(rep.r) &&
             rep.min_count > 0;
  }
  return rep;
}

}  // namespace selmallows
