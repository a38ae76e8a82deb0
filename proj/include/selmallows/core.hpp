#pragma once

// Ranking types, Kendall tau distances, restriction and the Mallows
// partition function. Alternatives and positions are 0-based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace selmallows {

using Item = std::uint32_t;

// A total order over a set of distinct alternatives.
class Ranking {
 public:
  Ranking() = default;

  explicit Ranking(std::vector<Item> items) : items_(std::move(items)) {
    Item hi = 0;
    for (auto it : items_) hi = std::max(hi, it);
    position_.assign(items_.empty() ? 0 : static_cast<std::size_t>(hi) + 1, kAbsent);
    for (std::size_t t = 0; t < items_.size(); ++t) {
      auto& slot = position_[items_[t]];
      if (slot != kAbsent) {
        throw std::invalid_argument("ranking contains duplicate item " + std::to_string(items_[t]));
      }
      slot = static_cast<std::int32_t>(t);
    }
  }

  static Ranking identity(std::size_t n) {
    std::vector<Item> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Item>(i);
    return Ranking(std::move(v));
  }

  // Builds a ranking from positions: position[i] is where alternative i goes.
  static Ranking from_positions(std::span<const std::size_t> position) {
    std::vector<Item> v(position.size(), 0);
    std::vector<bool> seen(position.size(), false);
    for (std::size_t i = 0; i < position.size(); ++i) {
      if (position[i] >= position.size() || seen[position[i]]) {
        throw std::invalid_argument("positions do not form a permutation");
      }
      seen[position[i]] = true;
      v[position[i]] = static_cast<Item>(i);
    }
    return Ranking(std::move(v));
  }

  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] const std::vector<Item>& items() const { return items_; }
  [[nodiscard]] Item operator[](std::size_t t) const { return items_[t]; }

  [[nodiscard]] bool contains(Item i) const {
    return i < position_.size() && position_[i] != kAbsent;
  }

  // Position of alternative i; throws if i is not ranked.
  [[nodiscard]] std::size_t position_of(Item i) const {
    if (!contains(i)) throw std::invalid_argument("item " + std::to_string(i) + " not in ranking");
    return static_cast<std::size_t>(position_[i]);
  }

  // True iff the ranking is a permutation of {0, ..., n-1}.
  [[nodiscard]] bool is_complete(std::size_t n) const {
    return items_.size() == n && position_.size() == n;
  }

  [[nodiscard]] Ranking reversed() const {
    return Ranking(std::vector<Item>(items_.rbegin(), items_.rend()));
  }

  friend bool operator==(const Ranking& a, const Ranking& b) { return a.items_ == b.items_; }
  friend bool operator<(const Ranking& a, const Ranking& b) { return a.items_ < b.items_; }

 private:
  static constexpr std::int32_t kAbsent = -1;

  std::vector<Item> items_;
  std::vector<std::int32_t> position_;
};

struct MallowsParams {
  Ranking center;
  double beta;

  MallowsParams(Ranking c, double b) : center(std::move(c)), beta(b) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
    if (!center.is_complete(center.size())) {
      throw std::invalid_argument("central ranking must be a permutation of 0..n-1");
    }
  }

  [[nodiscard]] std::size_t n() const { return center.size(); }
};

// Ordered list of alternative subsets. Each set is stored sorted ascending.
class SelectionSequence {
 public:
  SelectionSequence() = default;

  SelectionSequence(std::size_t n, std::vector<std::vector<Item>> sets) : n_(n), sets_(std::move(sets)) {
    for (std::size_t l = 0; l < sets_.size(); ++l) {
      auto& s = sets_[l];
      std::sort(s.begin(), s.end());
      if (s.size() < 2) {
        throw std::invalid_argument("selection set " + std::to_string(l) + " has fewer than 2 alternatives");
      }
      if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
        throw std::invalid_argument("selection set " + std::to_string(l) + " repeats an alternative");
      }
      if (s.back() >= n_) {
        throw std::invalid_argument("selection set " + std::to_string(l) + " has alternative >= n");
      }
    }
  }

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t size() const { return sets_.size(); }
  [[nodiscard]] bool empty() const { return sets_.empty(); }
  [[nodiscard]] const std::vector<Item>& operator[](std::size_t l) const { return sets_[l]; }
  [[nodiscard]] const std::vector<std::vector<Item>>& sets() const { return sets_; }

  friend bool operator==(const SelectionSequence&, const SelectionSequence&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<Item>> sets_;
};

// Incomplete rankings, one per selection set.
class SampleProfile {
 public:
  SampleProfile() = default;

  SampleProfile(SelectionSequence selection, std::vector<Ranking> rankings)
      : selection_(std::move(selection)), rankings_(std::move(rankings)) {
    if (rankings_.size() != selection_.size()) {
      throw std::invalid_argument("profile length differs from selection length");
    }
    for (std::size_t l = 0; l < rankings_.size(); ++l) {
      auto sorted = rankings_[l].items();
      std::sort(sorted.begin(), sorted.end());
      if (sorted != selection_[l]) {
        throw std::invalid_argument("ranking " + std::to_string(l) + " is not a permutation of its selection set");
      }
    }
  }

  [[nodiscard]] std::size_t n() const { return selection_.n(); }
  [[nodiscard]] std::size_t size() const { return rankings_.size(); }
  [[nodiscard]] bool empty() const { return rankings_.empty(); }
  [[nodiscard]] const SelectionSequence& selection() const { return selection_; }
  [[nodiscard]] const std::vector<Ranking>& rankings() const { return rankings_; }
  [[nodiscard]] const Ranking& operator[](std::size_t l) const { return rankings_[l]; }

  friend bool operator==(const SampleProfile& a, const SampleProfile& b) {
    return a.selection_ == b.selection_ && a.rankings_ == b.rankings_;
  }

 private:
  SelectionSequence selection_;
  std::vector<Ranking> rankings_;
};

// Comma-separated items in rank order, e.g. "4,2,0,3,1".
inline std::ostream& operator<<(std::ostream& os, const Ranking& r) {
  for (std::size_t t = 0; t < r.size(); ++t) os << (t ? "," : "") << r[t];
  return os;
}

namespace detail {

// Counts inversions of v by merge sort; v is left sorted.
inline std::uint64_t count_inversions(std::vector<std::size_t>& v) {
  std::vector<std::size_t> buf(v.size());
  std::uint64_t inv = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inv += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return inv;
}

}  // namespace detail

// Number of discordant pairs between two rankings of the same item set.
inline std::uint64_t kendall_tau(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kendall_tau: item sets differ in size");
  std::vector<std::size_t> seq(b.size());
  for (std::size_t t = 0; t < b.size(); ++t) {
    if (!a.contains(b[t])) throw std::invalid_argument("kendall_tau: item sets differ");
    seq[t] = a.position_of(b[t]);
  }
  return detail::count_inversions(seq);
}

// The ranking over s that keeps the relative order pi induces.
inline Ranking restrict(const Ranking& pi, std::span<const Item> s) {
  if (s.empty()) throw std::invalid_argument("restrict: empty subset");
  std::vector<std::pair<std::size_t, Item>> keyed;
  keyed.reserve(s.size());
  for (auto i : s) {
    if (!pi.contains(i)) throw std::invalid_argument("restrict: item " + std::to_string(i) + " not in ranking");
    keyed.emplace_back(pi.position_of(i), i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<Item> out;
  out.reserve(keyed.size());
  for (std::size_t t = 0; t < keyed.size(); ++t) {
    if (t > 0 && keyed[t].first == keyed[t - 1].first) {
      throw std::invalid_argument("restrict: subset repeats an item");
    }
    out.push_back(keyed[t].second);
  }
  return Ranking(std::move(out));
}

// Pairs of the sample's items ranked reversely by the center.
inline std::uint64_t kendall_tau_incomplete(const Ranking& center, const Ranking& sample) {
  std::vector<std::size_t> seq(sample.size());
  for (std::size_t t = 0; t < sample.size(); ++t) {
    if (!center.contains(sample[t])) {
      throw std::invalid_argument("kendall_tau_incomplete: unknown item " + std::to_string(sample[t]));
    }
    seq[t] = center.position_of(sample[t]);
  }
  return detail::count_inversions(seq);
}

// log Z(m, beta) = sum_{t=1..m} log((1 - e^{-t beta}) / (1 - e^{-beta})).
inline double log_partition_function(std::size_t m, double beta) {
  if (m == 0) throw std::invalid_argument("partition_function: m must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("partition_function: beta must be positive");
  const double log_denom = std::log(-std::expm1(-beta));
  double acc = 0.0;
  for (std::size_t t = 1; t <= m; ++t) {
    acc += std::log(-std::expm1(-static_cast<double>(t) * beta)) - log_denom;
  }
  return acc;
}

inline double partition_function(std::size_t m, double beta) {
  return std::exp(log_partition_function(m, beta));
}

// max_i |position_a(i) - position_b(i)| for complete rankings over the same n.
inline std::size_t pointwise_distance(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size() || !a.is_complete(a.size()) || !b.is_complete(b.size())) {
    throw std::invalid_argument("pointwise_distance: rankings must be complete over the same n");
  }
  std::size_t worst = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const std::size_t other = b.position_of(a[t]);
    worst = std::max(worst, other > t ? other - t : t - other);
  }
  return worst;
}

}  // namespace selmallows
