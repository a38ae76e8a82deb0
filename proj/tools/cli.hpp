#pragma once

// mallows_select command line. dispatch() is separate from main() so tests
// can drive it with in-memory streams.
//
// Exit status: 0 ok, 1 usage error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "selmallows/estimators.hpp"
#include "selmallows/experiments.hpp"
#include "selmallows/io.hpp"
#include "selmallows/mle.hpp"
#include "selmallows/report.hpp"
#include "selmallows/sampling.hpp"

namespace mallows_cli {

using json = nlohmann::json;
using namespace selmallows;

namespace detail {

// Writes to `out` when path is "-", else to the file.
inline void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") {
    fn(out);
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(f);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

inline ParsedFile load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return parse_file(f);
}

inline json issues_json(const std::vector<FileIssue>& issues) {
  json arr = json::array();
  for (const auto& i : issues) arr.push_back({{"line", i.line}, {"message", i.message}});
  return arr;
}

inline json config_json(const ExperimentConfig& c) {
  return {{"n", c.n},
          {"beta", c.beta},
          {"p_values", c.p_values},
          {"target_success", c.target_success},
          {"trials_per_point", c.trials_per_point},
          {"searches", c.searches},
          {"r_grid", c.r_grid},
          {"k", c.k},
          {"selection_kind", std::string(to_string(c.selection_kind))},
          {"q", c.q},
          {"estimator", std::string(to_string(c.estimator))},
          {"seed", c.seed},
          {"r_cap", c.r_cap}};
}

inline std::string with_extension(const std::string& path, const std::string& ext) {
  return std::filesystem::path(path).replace_extension(ext).string();
}

}  // namespace detail

// Options shared by the experiment subcommands; unset values keep the base config.
struct ExperimentFlags {
  std::string preset;
  std::string config_file;
  std::optional<std::size_t> n, trials, searches, k, r_cap;
  std::optional<double> beta, target, q;
  std::string p_values, r_grid, selection_kind, estimator;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string svg, meta;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "named parameterization")->check(CLI::IsMember({"figure1", "figure2", "figure3"}));
    cmd->add_option("--config", config_file, "flat key=value config file")->check(CLI::ExistingFile);
    cmd->add_option("--n", n, "number of alternatives");
    cmd->add_option("--beta", beta, "spread parameter");
    cmd->add_option("--p-values", p_values, "comma list of frequency parameters (fractions allowed)");
    cmd->add_option("--target", target, "target success rate");
    cmd->add_option("--trials", trials, "trials per probe or grid cell");
    cmd->add_option("--searches", searches, "independent binary searches per p");
    cmd->add_option("--r-grid", r_grid, "profile sizes: comma list or lo:hi:step");
    cmd->add_option("--k", k, "top-k size");
    cmd->add_option("--selection-kind", selection_kind, "selection generator")
        ->check(CLI::IsMember({"complete", "pairwise", "mixed_pfrequent", "bernoulli_random", "adversarial_matching"}));
    cmd->add_option("--q", q, "inclusion probability for bernoulli_random");
    cmd->add_option("--estimator", estimator, "posest, ltn or mle")->check(CLI::IsMember({"posest", "ltn", "mle"}));
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--r-cap", r_cap, "largest r the doubling phase may probe");
    cmd->add_option("--out", out, "CSV output path, - for stdout");
    cmd->add_option("--svg", svg, "SVG plot path (default: next to --out)");
    cmd->add_option("--meta", meta, "JSON metadata path (default: next to --out)");
  }

  [[nodiscard]] ExperimentConfig resolve(ExperimentConfig base) const {
    if (!preset.empty()) base = selmallows::preset(preset);
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      base = read_config(f, base);
    }
    auto set = [&](const char* key, const std::string& v) {
      if (!v.empty()) apply_config_value(base, key, v);
    };
    if (n) base.n = *n;
    if (beta) base.beta = *beta;
    set("p_values", p_values);
    if (target) base.target_success = *target;
    if (trials) base.trials_per_point = *trials;
    if (searches) base.searches = *searches;
    set("r_grid", r_grid);
    if (k) base.k = *k;
    set("selection_kind", selection_kind);
    if (q) base.q = *q;
    set("estimator", estimator);
    if (seed) base.seed = *seed;
    if (r_cap) base.r_cap = *r_cap;
    return base;
  }

  [[nodiscard]] std::string svg_path() const {
    if (!svg.empty()) return svg;
    return out == "-" ? "" : detail::with_extension(out, ".svg");
  }

  [[nodiscard]] std::string meta_path() const {
    if (!meta.empty()) return meta;
    return out == "-" ? "" : detail::with_extension(out, ".meta.json");
  }
};

inline void log_config(std::ostream& err, const std::string& command, const ExperimentConfig& c, unsigned threads) {
  err << "command=" << command << '\n';
  std::istringstream lines(format_config(c));
  std::string line;
  while (std::getline(lines, line)) err << line << '\n';
  err << "threads=" << threads << '\n';
}

inline void write_experiment_outputs(const ExperimentFlags& flags, std::ostream& out, const std::string& command,
                                     const ExperimentConfig& cfg, const std::function<void(std::ostream&)>& csv,
                                     const Plot& plot, json extra) {
  detail::emit(flags.out, out, csv);
  if (const auto svg = flags.svg_path(); !svg.empty()) {
    detail::emit(svg, out, [&](std::ostream& os) { os << render_svg(plot); });
  }
  if (const auto meta = flags.meta_path(); !meta.empty()) {
    json m = {{"command", command}, {"seed", cfg.seed}, {"config", detail::config_json(cfg)}};
    for (auto& [key, v] : extra.items()) m[key] = v;
    detail::emit(meta, out, [&](std::ostream& os) { os << m.dump(2) << '\n'; });
  }
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selective Mallows sampling, ranking recovery and experiments", "mallows_select"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads_flag = 0;
  app.add_option("--threads", threads_flag, "worker threads for experiments (default: MALLOWS_SELECT_THREADS or all cores)")
      ->envname("MALLOWS_SELECT_THREADS");

  // sample / select
  struct {
    std::size_t n = 0, r = 0;
    double beta = 1.0, p = 1.0, q = 0.0;
    std::string kind = "mixed_pfrequent", center, selection_file, out = "-";
    std::uint64_t seed = 1;
  } gen;
  auto kind_check = CLI::IsMember({"complete", "pairwise", "mixed_pfrequent", "bernoulli_random", "adversarial_matching"});
  auto* sample = app.add_subcommand("sample", "draw a selective Mallows sample profile");
  sample->add_option("--n", gen.n, "number of alternatives")->required();
  sample->add_option("--beta", gen.beta, "spread parameter")->required();
  sample->add_option("--p", gen.p, "frequency parameter");
  sample->add_option("--r", gen.r, "profile length");
  sample->add_option("--kind", gen.kind, "selection generator")->check(kind_check);
  sample->add_option("--q", gen.q, "inclusion probability for bernoulli_random");
  sample->add_option("--center", gen.center, "central ranking line (default: uniform from the seed)");
  sample->add_option("--selection", gen.selection_file, "sample on the sets of this selection file")->check(CLI::ExistingFile);
  sample->add_option("--seed", gen.seed, "seed");
  sample->add_option("--out", gen.out, "output path, - for stdout");

  auto* select = app.add_subcommand("select", "generate a selection sequence");
  select->add_option("--n", gen.n, "number of alternatives")->required();
  select->add_option("--p", gen.p, "frequency parameter");
  select->add_option("--r", gen.r, "sequence length")->required();
  select->add_option("--kind", gen.kind, "selection generator")->check(kind_check);
  select->add_option("--q", gen.q, "inclusion probability for bernoulli_random");
  select->add_option("--seed", gen.seed, "seed");
  select->add_option("--out", gen.out, "output path, - for stdout");

  // estimators
  struct {
    std::string in, out = "-", mode = "ltn", estimator = "posest";
    std::uint64_t seed = 1;
    bool raw = false, diagnostics = false;
    std::optional<double> beta, p;
    double alpha = 1.0, c1 = 1.0;
    std::optional<std::size_t> radius;
    std::uint64_t budget = std::uint64_t{1} << 22;
    std::size_t k = 1;
  } est;
  auto* posest = app.add_subcommand("posest", "positional estimator of a profile file");
  posest->add_option("--in", est.in, "profile file")->required()->check(CLI::ExistingFile);
  posest->add_option("--seed", est.seed, "tie-break seed");
  posest->add_flag("--emit-raw-scores", est.raw, "add raw scores to the JSON diagnostics line");
  posest->add_flag("--diagnostics", est.diagnostics, "write a JSON diagnostics line after the ranking");
  posest->add_option("--out", est.out, "output path, - for stdout");

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--beta", est.beta, "spread parameter (default: profile header)");
    cmd->add_option("--p", est.p, "frequency parameter (default: observed minimum pair frequency)");
    cmd->add_option("--alpha", est.alpha, "confidence exponent");
    cmd->add_option("--c1", est.c1, "window multiplier");
    cmd->add_option("--radius-override", est.radius, "fixed initial window radius");
    cmd->add_option("--budget", est.budget, "maximum DP state count");
  };
  auto* mle = app.add_subcommand("mle", "windowed maximum likelihood recovery");
  mle->add_option("--in", est.in, "profile file")->required()->check(CLI::ExistingFile);
  mle->add_option("--mode", est.mode, "ltn or mle")->check(CLI::IsMember({"ltn", "mle"}));
  add_model(mle);
  mle->add_option("--seed", est.seed, "tie-break seed");
  mle->add_option("--out", est.out, "output path, - for stdout");

  auto* topk = app.add_subcommand("topk", "top-k prefix of an estimate");
  topk->add_option("--in", est.in, "profile file")->required()->check(CLI::ExistingFile);
  topk->add_option("--k", est.k, "prefix length")->required();
  topk->add_option("--estimator", est.estimator, "posest, ltn or mle")->check(CLI::IsMember({"posest", "ltn", "mle"}));
  add_model(topk);
  topk->add_option("--seed", est.seed, "tie-break seed");
  topk->add_option("--out", est.out, "output path, - for stdout");

  // experiments
  ExperimentFlags fc, fd, ft, fa;
  auto* exp_c = app.add_subcommand("exp-complexity", "sample complexity by binary search over r");
  fc.attach(exp_c);
  auto* exp_d = app.add_subcommand("exp-distance", "mean Kendall tau distance over an r grid");
  fd.attach(exp_d);
  auto* exp_t = app.add_subcommand("exp-topk", "top-k and full recovery rates over an r grid");
  ft.attach(exp_t);
  auto* exp_a = app.add_subcommand("exp-adversarial", "adversarial matching vs mixed selection failure rates");
  fa.attach(exp_a);

  // verify
  std::vector<std::string> verify_files;
  std::optional<double> verify_p;
  std::string verify_out = "-";
  auto* verify = app.add_subcommand("verify", "validate profile or selection files");
  verify->add_option("files", verify_files, "files to check")->required()->check(CLI::ExistingFile);
  verify->add_option("--p", verify_p, "required frequency parameter");
  verify->add_option("--out", verify_out, "report path, - for stdout");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return 0;
    }
    app.exit(e, err, err);
    err << app.help();
    return 1;
  }

  const unsigned threads = resolve_threads(threads_flag);
  try {
    if (*sample || *select) {
      const bool is_sample = static_cast<bool>(*sample);
      const Rng root(gen.seed);
      SelectionSequence selection;
      if (is_sample && !gen.selection_file.empty()) {
        selection = to_selection(detail::load(gen.selection_file));
        if (selection.n() != gen.n) throw std::invalid_argument("selection file has n = " + std::to_string(selection.n()));
      } else {
        if (gen.r == 0) throw std::invalid_argument("--r is required and must be >= 1");
        SelectionSpec spec{parse_selection_kind(gen.kind), gen.n, gen.p, gen.q, {}};
        selection = generate_selection(spec, gen.r, root.split(1));
      }
      err << "command=" << (is_sample ? "sample" : "select") << "\nseed=" << gen.seed << "\nn=" << gen.n
          << "\nr=" << selection.size() << "\np=" << fmt_exact(gen.p) << "\nkind=" << gen.kind << '\n';
      if (!is_sample) {
        detail::emit(gen.out, out, [&](std::ostream& os) { write_selection(os, selection); });
        return 0;
      }
      Ranking center;
      if (gen.center.empty()) {
        Rng c = root.split(0);
        center = random_ranking(gen.n, c);
      } else {
        center = parse_ranking(gen.center);
      }
      if (!center.is_complete(gen.n)) throw std::invalid_argument("--center must be a permutation of 0..n-1");
      err << "beta=" << fmt_exact(gen.beta) << "\ncenter=" << center << '\n';
      const auto profile = sample_profile(MallowsParams(center, gen.beta), selection, root.split(2));
      detail::emit(gen.out, out, [&](std::ostream& os) { write_profile(os, profile, gen.beta); });
      return 0;
    }

    if (*posest || *mle || *topk) {
      const auto parsed = detail::load(est.in);
      const SampleProfile profile = to_profile(parsed);
      Rng rng(est.seed);
      const char* name = *posest ? "posest" : *mle ? "mle" : "topk";
      err << "command=" << name << "\nseed=" << est.seed << "\nn=" << profile.n() << "\nr=" << profile.size() << '\n';

      auto model = [&](MleReport& rep, MleMode mode) {
        const double beta = est.beta ? *est.beta : parsed.beta ? *parsed.beta : 0.0;
        if (!(beta > 0.0)) throw std::invalid_argument("--beta is required when the profile header has none");
        double p = 0.0;
        if (est.p) {
          p = *est.p;
        } else {
          const auto freq = verify_p_frequent(profile.selection(), 0.0);
          p = static_cast<double>(freq.min_count) / static_cast<double>(profile.size());
          if (!(p > 0.0)) throw std::invalid_argument("some pair never co-appears; pass --p explicitly");
        }
        RecoverOptions opt;
        opt.alpha = est.alpha;
        opt.c1 = est.c1;
        opt.radius_override = est.radius;
        opt.budget = est.budget;
        err << "mode=" << to_string(mode) << "\nbeta=" << fmt_exact(beta) << "\np=" << fmt_exact(p)
            << "\nalpha=" << fmt_exact(est.alpha) << "\nbudget=" << est.budget << '\n';
        rep = mode == MleMode::maximum_likelihood ? recover_mle(profile, beta, p, opt, rng)
                                                  : recover_likelier_than_nature(profile, beta, p, opt, rng);
        err << "window_initial=" << rep.initial_window << "\nwindow_used=" << rep.window_used
            << "\nwidenings=" << rep.widenings << '\n';
      };

      if (*posest) {
        const auto res = positional_estimator(profile, rng);
        detail::emit(est.out, out, [&](std::ostream& os) {
          os << res.ranking << '\n';
          if (est.raw || est.diagnostics) {
            json d = {{"tie_groups", res.tie_groups},
                      {"zero_appearance_pairs", res.zero_appearance_pairs},
                      {"absent_alternatives", res.absent_alternatives}};
            if (est.raw) d["raw_scores"] = res.raw_scores;
            os << d.dump() << '\n';
          }
        });
        return 0;
      }
      if (*mle) {
        MleReport rep;
        model(rep, est.mode == "mle" ? MleMode::maximum_likelihood : MleMode::likelier_than_nature);
        json j = {{"result", format_ranking(rep.result)},
                  {"anchor", format_ranking(rep.anchor)},
                  {"mode", std::string(to_string(rep.mode))},
                  {"score_achieved", rep.score_achieved},
                  {"initial_window", rep.initial_window},
                  {"window_used", rep.window_used},
                  {"widenings", rep.widenings},
                  {"log_likelihood", rep.log_likelihood}};
        detail::emit(est.out, out, [&](std::ostream& os) { os << rep.result << '\n' << j.dump() << '\n'; });
        return 0;
      }
      Ranking estimate;
      const auto e = parse_estimator(est.estimator);
      if (e == Estimator::posest) {
        estimate = positional_estimator(profile, rng).ranking;
      } else {
        MleReport rep;
        model(rep, e == Estimator::maximum_likelihood ? MleMode::maximum_likelihood : MleMode::likelier_than_nature);
        estimate = rep.result;
      }
      detail::emit(est.out, out, [&](std::ostream& os) { os << top_k(estimate, est.k) << '\n'; });
      return 0;
    }

    if (*exp_c) {
      auto cfg = fc.resolve(preset("figure1"));
      cfg.threads = threads;
      log_config(err, "exp-complexity", cfg, threads);
      const auto curve = run_complexity_experiment(cfg);
      json extra;
      if (curve.points.size() >= 2) {
        const auto fit = complexity_fit(curve);
        extra["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
        err << "fit_slope=" << fmt_num(fit.slope) << "\nfit_r_squared=" << fmt_num(fit.r_squared) << '\n';
      }
      json per_p = json::array();
      for (const auto& pt : curve.points) per_p.push_back({{"p", pt.p}, {"r_star", pt.r_stars}});
      extra["r_star_samples"] = per_p;
      write_experiment_outputs(fc, out, "exp-complexity", cfg, [&](std::ostream& os) { write_complexity_csv(os, curve); },
                               complexity_plot(curve), extra);
      return 0;
    }
    if (*exp_d) {
      auto cfg = fd.resolve(preset("figure2"));
      cfg.threads = threads;
      log_config(err, "exp-distance", cfg, threads);
      const auto curve = run_distance_experiment(cfg);
      write_experiment_outputs(fd, out, "exp-distance", cfg, [&](std::ostream& os) { write_distance_csv(os, curve); },
                               distance_plot(curve), json::object());
      return 0;
    }
    if (*exp_t) {
      ExperimentConfig base;
      base.p_values = {0.5};
      base.k = 3;
      base.r_grid = {4, 8, 12, 16, 20, 24, 28, 32, 36, 40};
      auto cfg = ft.resolve(base);
      cfg.threads = threads;
      log_config(err, "exp-topk", cfg, threads);
      const auto pts = run_topk_experiment(cfg);
      write_experiment_outputs(ft, out, "exp-topk", cfg, [&](std::ostream& os) { write_topk_csv(os, pts); },
                               topk_plot(pts), json::object());
      return 0;
    }
    if (*exp_a) {
      ExperimentConfig base;
      base.beta = 1.0;
      base.p_values = {1.0};
      base.trials_per_point = 1000;
      base.r_grid = {1, 2, 4, 8, 16, 32, 64};
      base.selection_kind = SelectionKind::adversarial_matching;
      auto cfg = fa.resolve(base);
      cfg.threads = threads;
      log_config(err, "exp-adversarial", cfg, threads);
      const auto reps = run_adversarial_experiment(cfg);
      json extra = {{"analytic_bound", adversarial_failure_bound(cfg.n, cfg.beta)}};
      write_experiment_outputs(fa, out, "exp-adversarial", cfg, [&](std::ostream& os) { write_adversarial_csv(os, reps); },
                               adversarial_plot(reps), extra);
      return 0;
    }

    if (*verify) {
      err << "command=verify\nfiles=" << verify_files.size() << '\n';
      if (verify_p) err << "p=" << fmt_exact(*verify_p) << '\n';
      json report = json::array();
      bool all_ok = true;
      for (const auto& path : verify_files) {
        const auto f = detail::load(path);
        json errors = detail::issues_json(f.issues);
        json entry = {{"file", path}, {"kind", f.has_rankings ? "profile" : "selection"}};
        if (f.ok() && verify_p) {
          const auto freq = verify_p_frequent(SelectionSequence(f.n, f.sets), *verify_p);
          entry["min_pair_count"] = freq.min_count;
          if (!freq.ok) {
            const auto [i, j] = freq.worst_pair;
            errors.push_back({{"line", 0},
                              {"message", "pair (" + std::to_string(i) + "," + std::to_string(j) + ") co-appears in " +
                                              std::to_string(freq.min_count) + " of " + std::to_string(freq.r) +
                                              " sets; p-frequency needs at least " + fmt_num(*verify_p * static_cast<double>(freq.r))},
                              {"pair", {i, j}},
                              {"count", freq.min_count}});
          }
        }
        entry["ok"] = errors.empty();
        entry["errors"] = errors;
        all_ok = all_ok && errors.empty();
        report.push_back(entry);
      }
      detail::emit(verify_out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
      err << "ok=" << (all_ok ? "true" : "false") << '\n';
      return all_ok ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& c : msg)
      if (c == '\n') c = ' ';
    err << "error=" << msg << '\n';
    return 2;
  }
  return 1;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, out, err);
}

}  // namespace mallows_cli
