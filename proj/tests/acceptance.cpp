// Acceptance runs: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "selmallows/estimators.hpp"
#include "selmallows/experiments.hpp"
#include "selmallows/mle.hpp"
#include "selmallows/report.hpp"
#include "selmallows/sampling.hpp"
#include "selmallows/stats.hpp"

using namespace selmallows;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Criterion 1: empirical pmf of the sampler vs brute-force enumeration.
Verdict sampler_exactness() {
  const Ranking center({3, 0, 4, 1, 2});
  const std::size_t draws = 1000000;
  double worst = 0.0;
  std::string worst_case;
  std::size_t cases = 0;
  const std::vector<double> betas{0.3, 1.0, 2.0};
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const InsertionTable table(betas[b], 5);
    for (unsigned mask = 1; mask < 32; ++mask) {
      if (__builtin_popcount(mask) > 4) continue;
      std::vector<Item> s, restricted;
      for (Item i = 0; i < 5; ++i)
        if (mask >> i & 1U) s.push_back(i);
      for (auto it : center.items())
        if (mask >> it & 1U) restricted.push_back(it);
      const auto exact = oracle::mallows_pmf(restricted, betas[b]);
      const Ranking sub = restrict(center, s);
      Rng rng = Rng(1001).split({b, mask});
      std::map<std::vector<Item>, std::size_t> hits;
      for (std::size_t d = 0; d < draws; ++d) ++hits[table.sample(sub, rng).items()];
      double tv = 0.0;
      for (const auto& [perm, prob] : exact) {
        const auto it = hits.find(perm);
        const double emp = it == hits.end() ? 0.0 : static_cast<double>(it->second) / draws;
        tv += std::abs(emp - prob);
      }
      for (const auto& [perm, c] : hits)
        if (!exact.count(perm)) tv += static_cast<double>(c) / draws;
      tv /= 2;
      ++cases;
      if (tv > worst) {
        worst = tv;
        worst_case = fmt("|S|=%zu beta=%.1f", s.size(), betas[b]);
      }
    }
  }
  return {worst < 0.005, fmt("%zu (S, beta) cases, 1e6 draws each, max TV %.5f at %s (bound 0.005)", cases, worst,
                             worst_case.c_str())};
}

// Criterion 2: argmax of the score equals argmax of the likelihood, as sets.
Verdict likelihood_score_equivalence() {
  Rng rng(2002);
  std::size_t mismatches = 0, tied_profiles = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
    const double beta = 0.2 + 0.1 * static_cast<double>(rng.below(20));
    const Ranking pi0 = random_ranking(n, rng);
    std::vector<std::vector<Item>> sets;
    const std::size_t r = 1 + rng.below(6);
    for (std::size_t l = 0; l < r; ++l) {
      std::vector<Item> s;
      while (s.size() < 2) {
        s.clear();
        for (Item i = 0; i < n; ++i)
          if (rng.below(2)) s.push_back(i);
      }
      sets.push_back(s);
    }
    const auto prof = sample_profile(MallowsParams(pi0, beta), SelectionSequence(n, sets), rng.split(trial));
    const auto counts = accumulate_counts(prof);
    std::vector<Item> id(n);
    std::iota(id.begin(), id.end(), Item{0});
    const auto perms = oracle::all_permutations(id);
    std::uint64_t best_s = 0;
    double best_l = -std::numeric_limits<double>::infinity();
    for (const auto& p : perms) {
      const Ranking pi(p);
      best_s = std::max(best_s, score(pi, counts));
      best_l = std::max(best_l, log_likelihood(pi, prof, beta));
    }
    std::set<std::vector<Item>> arg_s, arg_l;
    for (const auto& p : perms) {
      const Ranking pi(p);
      if (score(pi, counts) == best_s) arg_s.insert(p);
      if (log_likelihood(pi, prof, beta) == best_l) arg_l.insert(p);
    }
    if (arg_s != arg_l) ++mismatches;
    if (arg_s.size() > 1) ++tied_profiles;
  }
  return {mismatches == 0, fmt("200 profiles with n in 2..6, %zu with tied maximizers, %zu argmax-set mismatches",
                               tied_profiles, mismatches)};
}

// Criterion 3: windowed DP vs brute force over the enumerated window.
Verdict dp_exactness() {
  Rng rng(3003);
  std::size_t instances = 0, mismatches = 0;
  for (std::size_t n = 2; n <= 8; ++n) {
    std::set<std::size_t> radii{0, 1, 2, 3, n - 1};
    for (std::size_t R : radii) {
      if (R > n - 1) continue;
      const Ranking anchor0 = random_ranking(n, rng);
      const auto ball0 = oracle::pointwise_ball(anchor0, R);
      for (int t = 0; t < 100; ++t) {
        const auto c = oracle::random_counts(n, 6, rng);
        const Ranking anchor = t == 0 ? anchor0 : random_ranking(n, rng);
        const auto ball = t == 0 ? ball0 : oracle::pointwise_ball(anchor, R);
        const auto dp = detail::window_search(c, anchor, R);
        const Ranking expect = oracle::best_in(ball, anchor, c);
        ++instances;
        if (dp.result != expect || dp.score != oracle::score_of(expect.items(), c)) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("%zu (n <= 8, R in {0,1,2,3,n-1}) instances, %zu mismatches", instances, mismatches)};
}

// Criterion 4: recover_mle vs brute force at n = 8, r = 3.
Verdict mle_pipeline() {
  std::size_t trials = 0, matches = 0, explained = 0, silent = 0;
  for (double beta : {0.5, 1.0})
    for (double p : {0.5, 1.0})
      for (std::uint64_t t = 0; t < 200; ++t) {
        Rng rng = Rng(4004).split({static_cast<std::uint64_t>(beta * 10), static_cast<std::uint64_t>(p * 10), t});
        Rng c = rng.split(0);
        const Ranking pi0 = random_ranking(8, c);
        const auto sel = generate_selection({SelectionKind::mixed_pfrequent, 8, p}, 3, rng.split(1));
        const auto prof = sample_profile(MallowsParams(pi0, beta), sel, rng.split(2));
        const auto counts = accumulate_counts(prof);
        const auto best = score(brute_force_mle(counts), counts);
        ++trials;
        try {
          Rng tie = rng.split(3);
          const auto rep = recover_mle(prof, beta, p, {}, tie);
          if (rep.score_achieved == best) {
            ++matches;
          } else {
            ++silent;
          }
        } catch (const BudgetExceeded&) {
          ++explained;
        }
      }
  const double rate = static_cast<double>(matches) / static_cast<double>(trials);
  return {rate >= 0.99 && silent == 0,
          fmt("%zu trials, maximum likelihood reached in %.4f, %zu budget errors, %zu silent misses", trials, rate,
              explained, silent)};
}

// Criterion 5: PosEst exact recovery at n = 20, beta = 2, p = 1, r = 40.
Verdict posest_desk_scale() {
  TrialSpec spec;
  spec.n = 20;
  spec.beta = 2.0;
  spec.selection = {SelectionKind::mixed_pfrequent, 20, 1.0};
  spec.r = 40;
  const TrialRunner runner(spec);
  const std::size_t s = count_successes(runner, 500, MatchRule::exact(), Rng(5005));
  const double rate = static_cast<double>(s) / 500;
  const auto ci = stats::wilson_interval(s, 500);
  return {rate >= 0.95 && ci.lo > 0.90,
          fmt("success %.3f over 500 trials, 95%% Wilson CI [%.3f, %.3f]", rate, ci.lo, ci.hi)};
}

Verdict complexity_fit_check(const ExperimentConfig& cfg) {
  const auto curve = run_complexity_experiment(cfg);
  const auto fit = complexity_fit(curve);
  std::string pts;
  for (const auto& pt : curve.points) pts += fmt(" %.2f", pt.mean_r_star);
  return {fit.r_squared >= 0.9 && fit.slope > 0,
          fmt("%zu searches x %zu trials, mean r* at 1/p=1..%zu:%s; slope %.3f, R^2 %.4f", cfg.searches,
              cfg.trials_per_point, curve.points.size(), pts.c_str(), fit.slope, fit.r_squared)};
}

// Criterion 7: distance curves decrease in r and are ordered by p.
Verdict figure2_check() {
  const auto curve = run_distance_experiment(preset("figure2"));
  bool ok = true;
  std::string d;
  for (const auto& s : curve.series) {
    const auto& lo = s.points.front();
    const auto& hi = s.points.back();
    const double q01 = stats::bootstrap_mean_diff_quantile(lo.samples, hi.samples, 0.01, 10000, Rng(7007));
    ok = ok && q01 > 0.0;
    d += fmt(" p=%.1f: %.2f -> %.2f (1%% bootstrap quantile of drop %.2f);", s.p, lo.mean_kt, hi.mean_kt, q01);
  }
  // Larger p should not be worse at the largest r, beyond two standard errors.
  for (std::size_t i = 0; i + 1 < curve.series.size(); ++i) {
    const auto& a = curve.series[i].points.back();
    const auto& b = curve.series[i + 1].points.back();
    const double se = std::sqrt(a.std_kt * a.std_kt / a.samples.size() + b.std_kt * b.std_kt / b.samples.size());
    ok = ok && a.mean_kt <= b.mean_kt + 2 * se;
  }
  d += " ordered by p at r=100";
  return {ok, d};
}

// Criterion 9: n = 2 sample complexity vs the exact binomial answer.
Verdict closed_form_anchor() {
  const double q = 1.0 / (1.0 + std::exp(-2.0));
  std::size_t exact = 1;
  while (oracle::binomial_majority(exact, q) < 0.95) ++exact;
  ExperimentConfig cfg;
  cfg.n = 2;
  cfg.beta = 2.0;
  cfg.p_values = {1.0};
  cfg.seed = 9009;
  const auto curve = run_complexity_experiment(cfg);
  const double est = curve.points[0].mean_r_star;
  return {std::abs(est - static_cast<double>(exact)) <= 2.0,
          fmt("exact smallest r = %zu, estimated mean r* = %.2f over %zu searches (tolerance 2)", exact, est,
              cfg.searches)};
}

// Criterion 10: adversarial sequence at r = 1.
Verdict adversarial_bound() {
  const auto rep = run_adversarial_demo(20, 1.0, 1.0, 1, 1000, Rng(1010));
  const double bar = rep.analytic_bound - 0.05;
  return {rep.adversarial_failure > bar,
          fmt("failure rate %.3f over 1000 trials vs bound %.4f - 0.05 = %.4f (mixed sequence %.3f)",
              rep.adversarial_failure, rep.analytic_bound, bar, rep.mixed_failure)};
}

// Criterion 11: top-k needs no more samples than full recovery.
Verdict topk_advantage() {
  ExperimentConfig cfg;
  cfg.p_values = {0.5};
  cfg.k = 3;
  cfg.seed = 1111;
  const auto res = run_topk_complexity(cfg);
  return {res.mean_r_topk <= res.mean_r_full,
          fmt("mean r* over 100 searches: top-3 %.2f, full ranking %.2f", res.mean_r_topk, res.mean_r_full)};
}

// Criterion 12: every preset gives the same CSV for 1 and 4 threads.
Verdict determinism() {
  std::string d;
  bool ok = true;
  for (const auto& [cmd, name] : std::vector<std::pair<std::string, std::string>>{
           {"exp-complexity", "figure1"}, {"exp-distance", "figure2"}, {"exp-complexity", "figure3"}}) {
    std::string csv[2];
    int codes[2];
    for (int v = 0; v < 2; ++v) {
      std::ostringstream out, err;
      codes[v] = mallows_cli::dispatch({"--threads", v == 0 ? "1" : "4", cmd, "--preset", name, "--seed", "1212",
                                        "--out", "-"},
                                       out, err);
      csv[v] = out.str();
    }
    const bool same = codes[0] == 0 && codes[1] == 0 && csv[0] == csv[1] && !csv[0].empty();
    ok = ok && same;
    d += fmt(" %s %s (%zu bytes);", name.c_str(), same ? "identical" : "DIFFERENT", csv[0].size());
  }
  return {ok, "threads 1 vs 4:" + d};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"sampler exactness", sampler_exactness},
      {"score/likelihood argmax equivalence", likelihood_score_equivalence},
      {"windowed DP exactness", dp_exactness},
      {"MLE pipeline vs brute force", mle_pipeline},
      {"PosEst recovery at n=20, r=40", posest_desk_scale},
      {"figure1 preset linear fit", [] { return complexity_fit_check(preset("figure1")); }},
      {"figure2 preset distance curves", figure2_check},
      {"figure3 preset linear fit", [] { return complexity_fit_check(preset("figure3")); }},
      {"n=2 closed-form sample complexity", closed_form_anchor},
      {"adversarial matching lower bound", adversarial_bound},
      {"top-k advantage", topk_advantage},
      {"determinism across thread counts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu: %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
