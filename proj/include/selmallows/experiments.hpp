#pragma once

// Monte-Carlo harness: success rates, sample-complexity binary searches,
// distance curves, top-k rates and the adversarial matching demonstration.
//
// Every trial draws from a substream that is a pure function of the master
// seed and the trial's coordinates (experiment, p index, search, r, trial),
// and results are reduced in index order, so output does not depend on the
// number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selmallows/core.hpp"
#include "selmallows/estimators.hpp"
#include "selmallows/mle.hpp"
#include "selmallows/parallel.hpp"
#include "selmallows/rng.hpp"
#include "selmallows/sampling.hpp"
#include "selmallows/stats.hpp"

namespace selmallows {

enum class Estimator { posest, likelier_than_nature, maximum_likelihood };

inline std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::posest: return "posest";
    case Estimator::likelier_than_nature: return "ltn";
    case Estimator::maximum_likelihood: return "mle";
  }
  return "?";
}

inline Estimator parse_estimator(std::string_view s) {
  if (s == "posest") return Estimator::posest;
  if (s == "ltn") return Estimator::likelier_than_nature;
  if (s == "mle") return Estimator::maximum_likelihood;
  throw std::invalid_argument("unknown estimator '" + std::string(s) + "'");
}

// k == 0 compares full rankings, otherwise the top-k prefixes.
struct MatchRule {
  std::size_t k = 0;

  static MatchRule exact() { return {}; }
  static MatchRule topk(std::size_t k) { return {k}; }

  [[nodiscard]] bool matches(const Ranking& estimate, const Ranking& truth) const {
    if (k == 0 || k >= truth.size()) return estimate == truth;
    return std::equal(truth.items().begin(), truth.items().begin() + static_cast<std::ptrdiff_t>(k),
                      estimate.items().begin());
  }
};

// Uniform: a fresh uniformly random center per trial. Planted: a uniformly
// random center in which the pairs of the first perfect matching are adjacent.
enum class CenterMode { uniform, planted_matching };

struct TrialSpec {
  std::size_t n = 0;
  double beta = 1.0;
  SelectionSpec selection;
  std::size_t r = 1;
  Estimator estimator = Estimator::posest;
  CenterMode center = CenterMode::uniform;
  RecoverOptions recover;
};

struct TrialOutcome {
  Ranking truth;
  Ranking estimate;
};

// True when generate_selection can produce r sets for this spec.
inline bool selection_feasible(const SelectionSpec& spec, std::size_t r) {
  if (r == 0) return false;
  if (spec.kind == SelectionKind::mixed_pfrequent || spec.kind == SelectionKind::adversarial_matching) {
    return spec.p * static_cast<double>(r) >= 1.0 - 1e-9;
  }
  return true;
}

// Runs single trials of one (n, beta, selection, r) configuration. The
// insertion table and any deterministic selection are built once.
class TrialRunner {
 public:
  explicit TrialRunner(TrialSpec spec) : spec_(std::move(spec)), table_(spec_.beta, std::max<std::size_t>(spec_.n, 1)) {
    if (spec_.n < 1) throw std::invalid_argument("n must be >= 1");
    if (spec_.r < 1) throw std::invalid_argument("r must be >= 1");
    spec_.selection.n = spec_.n;
    validate(spec_.selection);
    if (spec_.center == CenterMode::planted_matching && spec_.n % 2 != 0) {
      throw std::invalid_argument("planted matching center requires even n");
    }
    if (spec_.selection.kind != SelectionKind::bernoulli_random) {
      fixed_selection_ = generate_selection(spec_.selection, spec_.r, Rng(0));
    }
  }

  [[nodiscard]] const TrialSpec& spec() const { return spec_; }

  [[nodiscard]] TrialOutcome run(const Rng& trial) const {
    TrialOutcome out;
    Rng center_rng = trial.split(0);
    if (spec_.center == CenterMode::uniform) {
      out.truth = random_ranking(spec_.n, center_rng);
    } else {
      out.truth = plant_adjacent_pairs(spec_.n, perfect_matching(spec_.n, 1), center_rng);
    }
    const SelectionSequence selection =
        fixed_selection_ ? *fixed_selection_ : generate_selection(spec_.selection, spec_.r, trial.split(1));
    const SampleProfile profile = sample_profile(MallowsParams(out.truth, spec_.beta), selection, table_, trial.split(2));
    Rng est = trial.split(3);
    switch (spec_.estimator) {
      case Estimator::posest:
        out.estimate = positional_estimator(profile, est).ranking;
        break;
      case Estimator::likelier_than_nature:
        out.estimate = recover_likelier_than_nature(profile, spec_.beta, spec_.selection.p, spec_.recover, est).result;
        break;
      case Estimator::maximum_likelihood:
        out.estimate = recover_mle(profile, spec_.beta, spec_.selection.p, spec_.recover, est).result;
        break;
    }
    return out;
  }

 private:
  TrialSpec spec_;
  InsertionTable table_;
  std::optional<SelectionSequence> fixed_selection_;
};

// Number of successes among trials 0..trials-1; trial t uses rng.split(t).
inline std::size_t count_successes(const TrialRunner& runner, std::size_t trials, const MatchRule& match,
                                   const Rng& rng, unsigned threads = 1) {
  std::vector<char> ok(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto o = runner.run(rng.split(t));
    ok[t] = match.matches(o.estimate, o.truth) ? 1 : 0;
  });
  std::size_t s = 0;
  for (char c : ok) s += static_cast<std::size_t>(c);
  return s;
}

inline double estimate_success_rate(const TrialSpec& spec, std::size_t trials, const MatchRule& match,
                                    const Rng& rng, unsigned threads = 1) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  const TrialRunner runner(spec);
  return static_cast<double>(count_successes(runner, trials, match, rng, threads)) / static_cast<double>(trials);
}

inline double estimate_success_rate(std::size_t n, double beta, double p, std::size_t r, std::size_t trials,
                                    SelectionKind kind, const Rng& rng, Estimator estimator = Estimator::posest,
                                    const MatchRule& match = MatchRule::exact()) {
  TrialSpec spec;
  spec.n = n;
  spec.beta = beta;
  spec.selection.kind = kind;
  spec.selection.p = p;
  spec.r = r;
  spec.estimator = estimator;
  return estimate_success_rate(spec, trials, match, rng);
}

// Smallest successes count that meets a target rate over `trials`.
inline std::size_t required_successes(double target, std::size_t trials) {
  return static_cast<std::size_t>(std::ceil(target * static_cast<double>(trials) - 1e-9));
}

// Whether at least `needed` of the trials succeed. Stops as soon as the
// answer is decided; each trial's stream is fixed, so the answer is the same
// as counting all of them.
inline bool meets_target(const TrialRunner& runner, std::size_t trials, std::size_t needed, const MatchRule& match,
                         const Rng& rng) {
  std::size_t good = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    if (good >= needed) return true;
    if (good + (trials - t) < needed) return false;
    const auto o = runner.run(rng.split(t));
    if (match.matches(o.estimate, o.truth)) ++good;
  }
  return good >= needed;
}

class SearchCapReached : public std::runtime_error {
 public:
  explicit SearchCapReached(std::size_t cap)
      : std::runtime_error("sample-complexity search reached the cap r = " + std::to_string(cap) +
                           " without meeting the target success rate"),
        cap_(cap) {}
  [[nodiscard]] std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

// Doubles r from 1 until meets(r) holds, then bisects the bracket until
// hi - lo <= 1 and returns hi.
template <class Meets>
std::size_t binary_search_complexity(Meets&& meets, std::size_t r_cap) {
  if (r_cap < 1) throw std::invalid_argument("r cap must be >= 1");
  std::size_t lo = 0, hi = 1;
  while (!meets(hi)) {
    if (hi >= r_cap) throw SearchCapReached(r_cap);
    lo = hi;
    hi = std::min(hi * 2, r_cap);
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (meets(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

struct ExperimentConfig {
  std::size_t n = 20;
  double beta = 2.0;
  std::vector<double> p_values{1.0, 1.0 / 2, 1.0 / 3, 1.0 / 4, 1.0 / 5, 1.0 / 6};
  double target_success = 0.95;
  std::size_t trials_per_point = 100;
  std::size_t searches = 100;
  std::vector<std::size_t> r_grid;
  std::size_t k = 0;
  SelectionKind selection_kind = SelectionKind::mixed_pfrequent;
  // Inclusion probability for bernoulli_random; 0 means sqrt(p).
  double q = 0.0;
  Estimator estimator = Estimator::posest;
  std::uint64_t seed = 1;
  std::size_t r_cap = std::size_t{1} << 16;
  // Not part of the result: output is identical for every value.
  unsigned threads = 1;

  void validate() const {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (p_values.empty()) throw std::invalid_argument("p_values is empty");
    for (double p : p_values)
      if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("every p must lie in (0, 1]");
    if (!(target_success > 0.0 && target_success < 1.0)) throw std::invalid_argument("target_success must lie in (0, 1)");
    if (trials_per_point < 1) throw std::invalid_argument("trials_per_point must be >= 1");
    if (searches < 1) throw std::invalid_argument("searches must be >= 1");
    if (k > n) throw std::invalid_argument("k must not exceed n");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      if (r_grid[i] < 1) throw std::invalid_argument("r_grid entries must be >= 1");
      if (i > 0 && r_grid[i] <= r_grid[i - 1]) throw std::invalid_argument("r_grid must be strictly increasing");
    }
  }

  [[nodiscard]] SelectionSpec selection(double p) const {
    SelectionSpec s;
    s.kind = selection_kind;
    s.n = n;
    s.p = p;
    s.q = q;
    return s;
  }

  [[nodiscard]] TrialSpec trial(double p, std::size_t r) const {
    TrialSpec t;
    t.n = n;
    t.beta = beta;
    t.selection = selection(p);
    t.r = r;
    t.estimator = estimator;
    return t;
  }
};

// Stream roots per experiment kind.
enum class ExperimentId : std::uint64_t { complexity = 1, distance = 2, topk = 3, adversarial = 4 };

inline Rng experiment_root(std::uint64_t seed, ExperimentId id) { return Rng(seed).split(static_cast<std::uint64_t>(id)); }

// One binary search for one p. Probe r draws its trials from search.split(r).
inline std::size_t search_complexity(const ExperimentConfig& cfg, double p, const MatchRule& match, const Rng& search) {
  const std::size_t needed = required_successes(cfg.target_success, cfg.trials_per_point);
  return binary_search_complexity(
      [&](std::size_t r) {
        if (!selection_feasible(cfg.selection(p), r)) return false;
        const TrialRunner runner(cfg.trial(p, r));
        return meets_target(runner, cfg.trials_per_point, needed, match, search.split(r));
      },
      cfg.r_cap);
}

struct ComplexityPoint {
  double p = 0.0;
  double inv_p = 0.0;
  double mean_r_star = 0.0;
  double std_r_star = 0.0;
  std::vector<std::size_t> r_stars;
};

struct ComplexityCurve {
  ExperimentConfig config;
  std::vector<ComplexityPoint> points;  // p descending
};

inline std::vector<double> sorted_descending(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline ComplexityCurve run_complexity_experiment(const ExperimentConfig& cfg, const MatchRule& match = MatchRule::exact()) {
  cfg.validate();
  ComplexityCurve curve;
  curve.config = cfg;
  const auto ps = sorted_descending(cfg.p_values);
  const Rng root = experiment_root(cfg.seed, ExperimentId::complexity);
  std::vector<std::size_t> r_star(ps.size() * cfg.searches);
  parallel_for(r_star.size(), cfg.threads, [&](std::size_t job) {
    const std::size_t pi = job / cfg.searches, s = job % cfg.searches;
    r_star[job] = search_complexity(cfg, ps[pi], match, root.split({pi, s}));
  });
  for (std::size_t pi = 0; pi < ps.size(); ++pi) {
    ComplexityPoint pt;
    pt.p = ps[pi];
    pt.inv_p = 1.0 / ps[pi];
    pt.r_stars.assign(r_star.begin() + static_cast<std::ptrdiff_t>(pi * cfg.searches),
                      r_star.begin() + static_cast<std::ptrdiff_t>((pi + 1) * cfg.searches));
    std::vector<double> v(pt.r_stars.begin(), pt.r_stars.end());
    pt.mean_r_star = stats::mean(v);
    pt.std_r_star = stats::stddev(v);
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

// Least-squares fit of mean r* against 1/p.
inline stats::LinearFit complexity_fit(const ComplexityCurve& curve) {
  std::vector<double> x, y;
  for (const auto& pt : curve.points) {
    x.push_back(pt.inv_p);
    y.push_back(pt.mean_r_star);
  }
  return stats::linear_fit(x, y);
}

struct DistancePoint {
  std::size_t r = 0;
  double mean_kt = 0.0;
  double std_kt = 0.0;
  std::vector<double> samples;
};

struct DistanceSeries {
  double p = 0.0;
  std::vector<DistancePoint> points;  // r increasing
};

struct DistanceCurve {
  ExperimentConfig config;
  std::vector<DistanceSeries> series;  // p descending
};

inline DistanceCurve run_distance_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.r_grid.empty()) throw std::invalid_argument("distance experiment needs a nonempty r_grid");
  DistanceCurve curve;
  curve.config = cfg;
  const auto ps = sorted_descending(cfg.p_values);
  const Rng root = experiment_root(cfg.seed, ExperimentId::distance);
  const std::size_t cells = ps.size() * cfg.r_grid.size();

  std::vector<std::optional<TrialRunner>> runners(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double p = ps[c / cfg.r_grid.size()];
    const std::size_t r = cfg.r_grid[c % cfg.r_grid.size()];
    if (!selection_feasible(cfg.selection(p), r)) {
      throw std::invalid_argument("r = " + std::to_string(r) + " is infeasible for p = " + std::to_string(p));
    }
    runners[c].emplace(cfg.trial(p, r));
  }
  std::vector<double> kt(cells * cfg.trials_per_point);
  parallel_for(kt.size(), cfg.threads, [&](std::size_t job) {
    const std::size_t c = job / cfg.trials_per_point, t = job % cfg.trials_per_point;
    const std::size_t pi = c / cfg.r_grid.size();
    const std::size_t r = cfg.r_grid[c % cfg.r_grid.size()];
    const auto o = runners[c]->run(root.split({pi, r, t}));
    kt[job] = static_cast<double>(kendall_tau(o.estimate, o.truth));
  });
  for (std::size_t pi = 0; pi < ps.size(); ++pi) {
    DistanceSeries s;
    s.p = ps[pi];
    for (std::size_t ri = 0; ri < cfg.r_grid.size(); ++ri) {
      const std::size_t c = pi * cfg.r_grid.size() + ri;
      DistancePoint pt;
      pt.r = cfg.r_grid[ri];
      pt.samples.assign(kt.begin() + static_cast<std::ptrdiff_t>(c * cfg.trials_per_point),
                        kt.begin() + static_cast<std::ptrdiff_t>((c + 1) * cfg.trials_per_point));
      pt.mean_kt = stats::mean(pt.samples);
      pt.std_kt = stats::stddev(pt.samples);
      s.points.push_back(std::move(pt));
    }
    curve.series.push_back(std::move(s));
  }
  return curve;
}

struct TopkPoint {
  std::size_t k = 0;
  std::size_t r = 0;
  double topk_success = 0.0;
  double full_success = 0.0;
  std::size_t trials = 0;
};

// Top-k and exact-recovery rates over r_grid at p = p_values[0], computed on
// the same trials.
inline std::vector<TopkPoint> run_topk_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.k < 1) throw std::invalid_argument("top-k experiment needs k >= 1");
  if (cfg.r_grid.empty()) throw std::invalid_argument("top-k experiment needs a nonempty r_grid");
  const double p = cfg.p_values.front();
  const Rng root = experiment_root(cfg.seed, ExperimentId::topk);
  const MatchRule topk = MatchRule::topk(cfg.k), full = MatchRule::exact();
  std::vector<TopkPoint> out;
  for (std::size_t r : cfg.r_grid) {
    if (!selection_feasible(cfg.selection(p), r)) {
      throw std::invalid_argument("r = " + std::to_string(r) + " is infeasible for p = " + std::to_string(p));
    }
    const TrialRunner runner(cfg.trial(p, r));
    std::vector<char> hit_k(cfg.trials_per_point), hit_full(cfg.trials_per_point);
    parallel_for(cfg.trials_per_point, cfg.threads, [&](std::size_t t) {
      const auto o = runner.run(root.split({r, t}));
      hit_k[t] = topk.matches(o.estimate, o.truth);
      hit_full[t] = full.matches(o.estimate, o.truth);
    });
    TopkPoint pt;
    pt.k = cfg.k;
    pt.r = r;
    pt.trials = cfg.trials_per_point;
    std::size_t a = 0, b = 0;
    for (std::size_t t = 0; t < cfg.trials_per_point; ++t) {
      a += static_cast<std::size_t>(hit_k[t]);
      b += static_cast<std::size_t>(hit_full[t]);
    }
    pt.topk_success = static_cast<double>(a) / static_cast<double>(pt.trials);
    pt.full_success = static_cast<double>(b) / static_cast<double>(pt.trials);
    out.push_back(pt);
  }
  return out;
}

struct TopkComplexity {
  double mean_r_topk = 0.0;
  double mean_r_full = 0.0;
  std::vector<std::size_t> r_topk;
  std::vector<std::size_t> r_full;
};

// Paired binary searches at p = p_values[0]: search s uses the same probe
// streams for the top-k and the exact-recovery target.
inline TopkComplexity run_topk_complexity(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.k < 1) throw std::invalid_argument("top-k search needs k >= 1");
  const double p = cfg.p_values.front();
  const Rng root = experiment_root(cfg.seed, ExperimentId::topk).split(0xC0);
  TopkComplexity res;
  res.r_topk.resize(cfg.searches);
  res.r_full.resize(cfg.searches);
  parallel_for(2 * cfg.searches, cfg.threads, [&](std::size_t job) {
    const std::size_t s = job / 2;
    if (job % 2 == 0) {
      res.r_topk[s] = search_complexity(cfg, p, MatchRule::topk(cfg.k), root.split(s));
    } else {
      res.r_full[s] = search_complexity(cfg, p, MatchRule::exact(), root.split(s));
    }
  });
  res.mean_r_topk = stats::mean(std::vector<double>(res.r_topk.begin(), res.r_topk.end()));
  res.mean_r_full = stats::mean(std::vector<double>(res.r_full.begin(), res.r_full.end()));
  return res;
}

// 1 - (1 - e^{-beta} / (1 + e^{-beta}))^{n/4}: the chance that at least one
// of n/4 adjacent pairs seen once is flipped.
inline double adversarial_failure_bound(std::size_t n, double beta) {
  const double flip = std::exp(-beta) / (1.0 + std::exp(-beta));
  return 1.0 - std::pow(1.0 - flip, static_cast<double>(n) / 4.0);
}

struct AdversarialReport {
  std::size_t n = 0;
  double beta = 0.0;
  double p = 0.0;
  std::size_t r = 0;
  std::size_t trials = 0;
  double adversarial_failure = 0.0;
  double mixed_failure = 0.0;
  double analytic_bound = 0.0;
};

// PosEst failure rates on the adversarial matching sequence and on the mixed
// p-frequent sequence, both against centers with the first matching's pairs
// adjacent. Trial t shares its center and sampling streams across the two.
inline AdversarialReport run_adversarial_demo(std::size_t n, double beta, double p, std::size_t r, std::size_t trials,
                                              const Rng& rng, unsigned threads = 1) {
  if (n % 2 != 0 || n < 2) throw std::invalid_argument("adversarial demo requires even n >= 2");
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  TrialSpec spec;
  spec.n = n;
  spec.beta = beta;
  spec.selection.kind = SelectionKind::adversarial_matching;
  spec.selection.p = p;
  spec.r = r;
  spec.center = CenterMode::planted_matching;
  const TrialRunner adversarial(spec);
  spec.selection.kind = SelectionKind::mixed_pfrequent;
  const TrialRunner mixed(spec);

  std::vector<char> fail_a(trials), fail_m(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const Rng tr = rng.split(t);
    const auto a = adversarial.run(tr);
    const auto m = mixed.run(tr);
    fail_a[t] = a.estimate != a.truth;
    fail_m[t] = m.estimate != m.truth;
  });
  AdversarialReport rep;
  rep.n = n;
  rep.beta = beta;
  rep.p = p;
  rep.r = r;
  rep.trials = trials;
  std::size_t fa = 0, fm = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    fa += static_cast<std::size_t>(fail_a[t]);
    fm += static_cast<std::size_t>(fail_m[t]);
  }
  rep.adversarial_failure = static_cast<double>(fa) / static_cast<double>(trials);
  rep.mixed_failure = static_cast<double>(fm) / static_cast<double>(trials);
  rep.analytic_bound = adversarial_failure_bound(n, beta);
  return rep;
}

// Adversarial demo over r_grid at p = p_values[0].
inline std::vector<AdversarialReport> run_adversarial_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.r_grid.empty()) throw std::invalid_argument("adversarial experiment needs a nonempty r_grid");
  const Rng root = experiment_root(cfg.seed, ExperimentId::adversarial);
  std::vector<AdversarialReport> out;
  for (std::size_t r : cfg.r_grid) {
    out.push_back(run_adversarial_demo(cfg.n, cfg.beta, cfg.p_values.front(), r, cfg.trials_per_point, root.split(r),
                                       cfg.threads));
  }
  return out;
}

// Named parameterizations of the published synthetic experiments.
inline ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  if (name == "figure1") {
    return c;
  }
  if (name == "figure2") {
    c.beta = 0.3;
    c.p_values = {1.0, 0.5, 0.2};
    c.searches = 1;
    c.r_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    return c;
  }
  if (name == "figure3") {
    c.selection_kind = SelectionKind::bernoulli_random;
    c.searches = 50;
    return c;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "' (expected figure1, figure2 or figure3)");
}

}  // namespace selmallows
