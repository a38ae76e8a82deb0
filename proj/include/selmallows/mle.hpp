#pragma once

// Windowed dynamic programming for score maximization over rankings that are
// pointwise close to an anchor, and the two recovery pipelines built on it.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selmallows/core.hpp"
#include "selmallows/estimators.hpp"
#include "selmallows/rng.hpp"

namespace selmallows {

enum class BoundaryPolicy { error, widen };

struct DpConfig {
  std::size_t radius = 0;
  Ranking anchor;
  std::uint64_t max_states_budget = std::uint64_t{1} << 22;
  BoundaryPolicy boundary_policy = BoundaryPolicy::error;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::size_t radius, std::uint64_t required, std::uint64_t budget)
      : std::runtime_error("window radius " + std::to_string(radius) + " needs a state budget of at least " +
                           std::to_string(required) + " (budget is " + std::to_string(budget) +
                           "); use a larger sample profile or raise the budget"),
        radius_(radius),
        required_(required) {}

  [[nodiscard]] std::size_t radius() const { return radius_; }
  [[nodiscard]] std::uint64_t required() const { return required_; }

 private:
  std::size_t radius_;
  std::uint64_t required_;
};

class BoundaryTouch : public std::runtime_error {
 public:
  BoundaryTouch(Ranking result, std::size_t radius)
      : std::runtime_error("optimum touches the window boundary at radius " + std::to_string(radius)),
        result_(std::move(result)),
        radius_(radius) {}

  [[nodiscard]] const Ranking& result() const { return result_; }
  [[nodiscard]] std::size_t radius() const { return radius_; }

 private:
  Ranking result_;
  std::size_t radius_;
};

// States per position for a window of radius R: 2^(2R+1).
inline std::uint64_t required_states(std::size_t radius) {
  if (2 * radius + 1 >= 63) return std::numeric_limits<std::uint64_t>::max();
  return std::uint64_t{1} << (2 * radius + 1);
}

struct DpOutcome {
  Ranking result;
  std::uint64_t score = 0;
  std::size_t radius = 0;
  bool touches_boundary = false;
};

namespace detail {

// Exact maximizer over {pi : |pi(i) - anchor(i)| <= R}, ties broken towards
// the lexicographically smallest sequence of anchor positions.
//
// With the anchor relabeled to the identity, position t may hold element e
// only if |e - t| <= R. Before filling t, every element below t-R is placed
// and nothing above t+R-1 is, so the state is the placed subset of the 2R
// elements t-R .. t+R-1 (exactly R of them; elements below 0 count as
// placed). Element t+R joins the window as a candidate at step t.
inline DpOutcome window_search(const PairwiseCounts& counts, const Ranking& anchor, std::size_t radius) {
  const std::size_t n = counts.n();
  if (!anchor.is_complete(n)) throw std::invalid_argument("dp: anchor must be complete over n");
  if (n == 0) return {anchor, 0, 0, false};
  const std::size_t R = std::min(radius, n - 1);
  const std::size_t W = 2 * R;

  std::vector<std::int64_t> w(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) w[a * n + b] = static_cast<std::int64_t>(counts.wins(anchor[a], anchor[b]));
  // tail[e * (n+1) + k] = sum_{k' >= k} w[e][k']
  std::vector<std::int64_t> tail(n * (n + 1), 0);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t k = n; k-- > 0;) tail[e * (n + 1) + k] = tail[e * (n + 1) + k + 1] + w[e * n + k];

  std::vector<std::vector<std::uint64_t>> binom(W + 2, std::vector<std::uint64_t>(R + 2, 0));
  for (std::size_t a = 0; a <= W + 1; ++a) {
    binom[a][0] = 1;
    for (std::size_t b = 1; b <= std::min(a, R + 1); ++b) binom[a][b] = binom[a - 1][b - 1] + (b <= a - 1 ? binom[a - 1][b] : 0);
  }
  auto rank = [&](std::uint64_t mask) {
    std::uint64_t r = 0;
    std::size_t i = 0;
    while (mask != 0) {
      const auto p = static_cast<std::size_t>(std::countr_zero(mask));
      ++i;
      r += binom[p][i];
      mask &= mask - 1;
    }
    return static_cast<std::size_t>(r);
  };

  // Masks with R bits among W, in colex order (Gosper's hack).
  std::vector<std::uint64_t> masks;
  {
    std::uint64_t m = (std::uint64_t{1} << R) - 1;
    const std::uint64_t limit = std::uint64_t{1} << W;
    if (R == 0) {
      masks.push_back(0);
    } else {
      while (m < limit) {
        masks.push_back(m);
        const std::uint64_t c = m & (0 - m);
        const std::uint64_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
      }
    }
  }
  const std::size_t S = masks.size();
  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::min() / 4;
  const std::uint64_t start_mask = (std::uint64_t{1} << R) - 1;

  std::vector<std::vector<std::int64_t>> value(n + 1, std::vector<std::int64_t>(S, kNone));
  value[n][rank(start_mask)] = 0;

  auto element = [&](std::size_t t, std::size_t k) -> std::ptrdiff_t {
    return static_cast<std::ptrdiff_t>(t + k) - static_cast<std::ptrdiff_t>(R);
  };

  // Evaluates placing window slot k at position t from `full` (W+1 bits).
  auto transition = [&](std::size_t t, std::uint64_t full, std::size_t k, const std::vector<std::size_t>& unplaced,
                        std::int64_t& out_value) {
    const std::uint64_t after = full | (std::uint64_t{1} << k);
    if ((after & 1U) == 0) return false;
    const std::int64_t next = value[t + 1][rank(after >> 1)];
    if (next == kNone) return false;
    const auto e = static_cast<std::size_t>(element(t, k));
    std::int64_t gain = 0;
    for (auto u : unplaced) gain += w[e * n + u];
    const std::size_t beyond = t + R + 1;
    if (beyond < n) gain += tail[e * (n + 1) + beyond];
    out_value = gain + next;
    return true;
  };

  std::vector<std::size_t> unplaced;
  auto collect = [&](std::size_t t, std::uint64_t full) {
    unplaced.clear();
    for (std::size_t k = 0; k <= W; ++k) {
      const auto e = element(t, k);
      if (e < 0 || e >= static_cast<std::ptrdiff_t>(n)) continue;
      if ((full >> k) & 1U) continue;
      unplaced.push_back(static_cast<std::size_t>(e));
    }
  };

  for (std::size_t t = n; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      const std::uint64_t full = masks[s];
      collect(t, full);
      std::int64_t best = kNone;
      for (std::size_t k = 0; k <= W; ++k) {
        const auto e = element(t, k);
        if (e < 0 || e >= static_cast<std::ptrdiff_t>(n) || ((full >> k) & 1U)) continue;
        std::int64_t v = 0;
        if (transition(t, full, k, unplaced, v)) best = std::max(best, v);
      }
      value[t][s] = best;
    }
  }

  std::uint64_t mask = start_mask;
  const std::int64_t total = value[0][rank(start_mask)];
  if (total == kNone) throw std::logic_error("dp: anchor infeasible");
  std::vector<Item> out;
  out.reserve(n);
  bool touches = false;
  for (std::size_t t = 0; t < n; ++t) {
    const std::int64_t target = value[t][rank(mask)];
    collect(t, mask);
    bool placed = false;
    for (std::size_t k = 0; k <= W && !placed; ++k) {
      const auto e = element(t, k);
      if (e < 0 || e >= static_cast<std::ptrdiff_t>(n) || ((mask >> k) & 1U)) continue;
      std::int64_t v = 0;
      if (transition(t, mask, k, unplaced, v) && v == target) {
        out.push_back(anchor[static_cast<std::size_t>(e)]);
        const std::size_t disp = k > R ? k - R : R - k;
        if (R > 0 && R < n - 1 && disp == R) touches = true;
        mask = (mask | (std::uint64_t{1} << k)) >> 1;
        placed = true;
      }
    }
    if (!placed) throw std::logic_error("dp: reconstruction failed");
  }
  return {Ranking(std::move(out)), static_cast<std::uint64_t>(total), R, touches};
}

inline void check_budget(std::size_t radius, std::size_t n, std::uint64_t budget) {
  const std::size_t R = n == 0 ? 0 : std::min(radius, n - 1);
  const auto need = required_states(R);
  if (need > budget) throw BudgetExceeded(R, need, budget);
}

}  // namespace detail

struct DpSearch {
  DpOutcome outcome;
  std::size_t widenings = 0;
};

// Runs the windowed search under the configured boundary policy. With
// `widen`, a boundary touch doubles the radius and reruns until the optimum
// is interior or the window covers every ranking.
inline DpSearch dp_search(const PairwiseCounts& counts, const DpConfig& config) {
  const std::size_t n = counts.n();
  if (config.anchor.size() != n) throw std::invalid_argument("dp: anchor and counts disagree on n");
  std::size_t R = n == 0 ? 0 : std::min(config.radius, n - 1);
  DpSearch out;
  for (;;) {
    detail::check_budget(R, n, config.max_states_budget);
    out.outcome = detail::window_search(counts, config.anchor, R);
    if (!out.outcome.touches_boundary) return out;
    if (config.boundary_policy == BoundaryPolicy::error) throw BoundaryTouch(out.outcome.result, R);
    R = std::min(std::max<std::size_t>(2 * R, 1), n - 1);
    ++out.widenings;
  }
}

inline Ranking dp_maximize(const PairwiseCounts& counts, const DpConfig& config) {
  return dp_search(counts, config).outcome.result;
}

enum class MleMode { likelier_than_nature, maximum_likelihood };

inline std::string_view to_string(MleMode m) {
  return m == MleMode::likelier_than_nature ? "likelier_than_nature" : "maximum_likelihood";
}

struct MleReport {
  Ranking result;
  Ranking anchor;
  MleMode mode = MleMode::likelier_than_nature;
  std::uint64_t score_achieved = 0;
  std::size_t initial_window = 0;
  std::size_t window_used = 0;
  std::size_t widenings = 0;
  double log_likelihood = 0.0;
};

struct RecoverOptions {
  double alpha = 1.0;
  // Multiplier on the asymptotic window formulas.
  double c1 = 1.0;
  std::optional<std::size_t> radius_override;
  std::uint64_t budget = std::uint64_t{1} << 22;
};

namespace detail {

inline double log_term(std::size_t n, double alpha) {
  return std::log(std::max(static_cast<double>(n) * (2.0 + alpha), 1.0 + 1e-12));
}

inline void check_model(double beta, double p, std::size_t r) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  if (r == 0) throw std::invalid_argument("profile is empty");
}

inline std::size_t to_radius(double x) {
  if (!(x < 1e9)) return static_cast<std::size_t>(1e9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x)));
}

}  // namespace detail

// Positional-estimator error margin: (beta^2 + 1) / (beta^3 p^2 r) * ln(n (2 + alpha)).
inline double window_margin(std::size_t n, double beta, double p, std::size_t r, double alpha) {
  detail::check_model(beta, p, r);
  return (beta * beta + 1.0) / (beta * beta * beta * p * p * static_cast<double>(r)) * detail::log_term(n, alpha);
}

// Displacement bound of the maximum likelihood ranking from the center:
// 1 / (beta p^3) + ln(n (2 + alpha)) / (beta p^4 r).
inline double mle_displacement(std::size_t n, double beta, double p, std::size_t r, double alpha) {
  detail::check_model(beta, p, r);
  const double rr = static_cast<double>(r);
  return 1.0 / (beta * p * p * p) + detail::log_term(n, alpha) / (beta * p * p * p * p * rr);
}

inline std::size_t window_ltn(std::size_t n, double beta, double p, std::size_t r, const RecoverOptions& opt) {
  return detail::to_radius(opt.c1 * window_margin(n, beta, p, r, opt.alpha));
}

// K + N, capped by h * N with h = 2 + 8/p + 8/p^2.
inline std::size_t window_mle(std::size_t n, double beta, double p, std::size_t r, const RecoverOptions& opt) {
  const double margin = window_margin(n, beta, p, r, opt.alpha);
  const double h = 2.0 + 8.0 / p + 8.0 / (p * p);
  const double widened = std::min(mle_displacement(n, beta, p, r, opt.alpha) + margin, h * margin);
  return detail::to_radius(opt.c1 * widened);
}

namespace detail {

inline MleReport recover(const SampleProfile& profile, double beta, std::size_t radius, MleMode mode,
                         const RecoverOptions& opt, Rng& rng) {
  const PairwiseCounts counts = accumulate_counts(profile);
  const Ranking anchor = positional_estimator(counts, rng).ranking;
  DpConfig cfg{radius, anchor, opt.budget, BoundaryPolicy::widen};
  const DpSearch search = dp_search(counts, cfg);
  MleReport rep;
  rep.result = search.outcome.result;
  rep.anchor = anchor;
  rep.mode = mode;
  rep.score_achieved = score(rep.result, counts);
  rep.initial_window = radius;
  rep.window_used = search.outcome.radius;
  rep.widenings = search.widenings;
  rep.log_likelihood = log_likelihood(rep.result, profile, beta);
  return rep;
}

}  // namespace detail

// Anchors the window search at the positional estimate with the radius of
// its error margin; the result is at least as likely as any center inside
// the final window.
inline MleReport recover_likelier_than_nature(const SampleProfile& profile, double beta, double p,
                                              const RecoverOptions& opt, Rng& rng) {
  const std::size_t R = opt.radius_override ? *opt.radius_override : window_ltn(profile.n(), beta, p, profile.size(), opt);
  return detail::recover(profile, beta, R, MleMode::likelier_than_nature, opt, rng);
}

// Same pipeline with the larger window that contains the maximum likelihood
// ranking with high probability.
inline MleReport recover_mle(const SampleProfile& profile, double beta, double p, const RecoverOptions& opt,
                             Rng& rng) {
  const std::size_t R = opt.radius_override ? *opt.radius_override : window_mle(profile.n(), beta, p, profile.size(), opt);
  return detail::recover(profile, beta, R, MleMode::maximum_likelihood, opt, rng);
}

}  // namespace selmallows
