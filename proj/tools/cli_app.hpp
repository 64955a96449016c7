#pragma once

// matnorm command-line front end. run_cli is kept in a header so tests can
// drive it in-process.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
// 3 numerical or degenerate input.

#include "matnorm/matnorm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace matnorm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

namespace detail {

using json = nlohmann::json;

// Applies a config-file value unless the flag was given on the command line.
template <class T>
void from_config(const json& cfg, const CLI::Option* opt, const char* key, T& value) {
  if (opt->count() > 0 || !cfg.contains(key)) return;
  value = cfg.at(key).get<T>();
}

// Spec and prior lists accept an array or a ';'-separated string.
inline void list_from_config(const json& cfg, const CLI::Option* opt, const char* key,
                             std::vector<std::string>& value) {
  if (opt->count() > 0 || !cfg.contains(key)) return;
  const json& v = cfg.at(key);
  value = v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
}

inline void grid_from_config(const json& cfg, const CLI::Option* opt, std::string& grid) {
  if (opt->count() > 0 || !cfg.contains("grid")) return;
  const json& v = cfg.at("grid");
  if (!v.is_array()) {
    grid = v.get<std::string>();
    return;
  }
  grid.clear();
  for (const auto& x : v) grid += (grid.empty() ? "" : ",") + format_double(x.get<double>());
}

inline std::vector<std::string> expand_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items)
    for (auto part : split(item, ';'))
      if (!trim(part).empty()) out.emplace_back(trim(part));
  return out;
}

inline json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  json cfg = json::parse(in);
  if (!cfg.is_object()) throw InvalidInput("config must be a JSON object");
  return cfg;
}

// Writes to --out when given, otherwise to the command's output stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidInput("cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct Resolved {
  SingularValueScenario scenario;
  std::vector<double> grid;
  std::vector<std::string> specs;
  std::vector<std::string> priors;
};

inline Resolved resolve_scenario(const std::string& name, int n, int m, const std::string& profile,
                                 const std::string& grid) {
  Resolved r;
  if (name == "custom" || (name.empty() && !profile.empty())) {
    if (profile.empty() || n <= 0 || m <= 0) throw InvalidInput("custom scenario needs --n, --m and --profile");
    r.scenario = custom_scenario(n, m, profile);
    if (grid.empty()) throw InvalidInput("custom scenario needs --grid");
  } else {
    if (name.empty()) throw InvalidInput("--scenario is required");
    auto def = builtin_scenario(name);
    r.scenario = def.scenario;
    r.grid = def.default_grid;
    r.specs = def.default_estimators;
    r.priors = def.default_priors;
  }
  if (!grid.empty()) r.grid = parse_grid(grid);
  return r;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix-norm shrinkage estimators, priors and risk experiments", "matnorm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config_path;
  std::string input, out_path, scenario, grid, profile;
  std::vector<std::string> specs, priors;
  std::uint64_t replicates = 0, is_samples = 0, seed = 1, samples = 10000, count = 100000;
  unsigned threads = 0;
  int n = 0, m = 0;
  double p = 1.0, alpha = 0.0;

  struct Flags {
    CLI::Option *input = nullptr, *spec = nullptr, *prior = nullptr, *scenario = nullptr, *grid = nullptr,
                *replicates = nullptr, *is_samples = nullptr, *seed = nullptr, *out = nullptr,
                *threads = nullptr, *n = nullptr, *m = nullptr, *profile = nullptr, *p = nullptr,
                *alpha = nullptr, *samples = nullptr, *count = nullptr;
  };
  std::map<std::string, Flags> flags;

  auto common = [&](CLI::App* sub, Flags& f) {
    sub->add_option("--config", config_path, "JSON file whose keys mirror the flag names");
    f.seed = sub->add_option("--seed", seed, "RNG seed (echoed into outputs)");
    f.threads = sub->add_option("--threads", threads, "worker cap; 0 uses all cores");
    f.out = sub->add_option("--out", out_path, "output file (default: standard output)");
  };
  auto list_option = [](CLI::App* sub, const char* name, std::vector<std::string>& target, const char* help) {
    return sub->add_option(name, target, help)->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };

  auto* estimate = app.add_subcommand("estimate", "apply an estimator to a matrix CSV");
  auto* sure_cmd = app.add_subcommand("sure", "unbiased risk estimate for a matrix CSV");
  for (auto* sub : {estimate, sure_cmd}) {
    auto& f = flags[sub->get_name()];
    common(sub, f);
    f.input = sub->add_option("--input", input, "matrix CSV (rows of numbers, no header)");
    f.spec = list_option(sub, "--spec", specs, "estimator spec, e.g. nns+, sure:p=0.5, mn:p=1.5,alpha=4");
  }

  auto* sweep = app.add_subcommand("risk-sweep", "Monte Carlo Frobenius risk over a grid");
  auto* predict = app.add_subcommand("predict-risk", "Kullback-Leibler risk of predictive densities");
  for (auto* sub : {sweep, predict}) {
    auto& f = flags[sub->get_name()];
    common(sub, f);
    f.scenario = sub->add_option("--scenario", scenario, "fig1a fig1b fig2 table1-top table1-bottom fig3a fig3b custom");
    f.grid = sub->add_option("--grid", grid, "\"1,10,100\" or lo:hi:count");
    f.replicates = sub->add_option("--replicates", replicates, "Monte Carlo replicates");
    f.is_samples = sub->add_option("--is-samples", is_samples, "importance samples per Bayes evaluation");
    f.prior = list_option(sub, "--prior", priors, "prior spec: uniform stein svs nns mn:p=<f>,alpha=<f>");
    f.n = sub->add_option("--n", n, "rows (custom scenario)");
    f.m = sub->add_option("--m", m, "columns (custom scenario)");
    f.profile = sub->add_option("--profile", profile, "custom singular values, e.g. \"x,0.8x,3,0\"");
  }
  flags["risk-sweep"].spec = list_option(sweep, "--spec", specs, "estimator specs (repeatable or ';'-separated)");

  auto* check = app.add_subcommand("check-prior", "scan the Laplacian of a matrix-norm prior for positive values");
  {
    auto& f = flags["check-prior"];
    common(check, f);
    f.p = check->add_option("--p", p, "Schatten exponent");
    f.alpha = check->add_option("--alpha", alpha, "prior exponent");
    f.n = check->add_option("--n", n, "rows");
    f.m = check->add_option("--m", m, "columns");
    f.samples = check->add_option("--samples", samples, "random singular-value profiles");
  }

  auto* lemmas = app.add_subcommand("verify-lemmas", "fuzz the auxiliary inequalities");
  {
    auto& f = flags["verify-lemmas"];
    common(lemmas, f);
    f.count = lemmas->add_option("--count", count, "draws per inequality");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const Flags& f = flags[name];
    const auto cfg = detail::load_config(config_path);
    detail::from_config(cfg, f.seed, "seed", seed);
    detail::from_config(cfg, f.threads, "threads", threads);
    detail::from_config(cfg, f.out, "out", out_path);
    if (f.input) detail::from_config(cfg, f.input, "input", input);
    if (f.spec) detail::list_from_config(cfg, f.spec, "spec", specs);
    if (f.prior) detail::list_from_config(cfg, f.prior, "prior", priors);
    if (f.scenario) detail::from_config(cfg, f.scenario, "scenario", scenario);
    if (f.grid) detail::grid_from_config(cfg, f.grid, grid);
    if (f.replicates) detail::from_config(cfg, f.replicates, "replicates", replicates);
    if (f.is_samples) detail::from_config(cfg, f.is_samples, "is-samples", is_samples);
    if (f.n) detail::from_config(cfg, f.n, "n", n);
    if (f.m) detail::from_config(cfg, f.m, "m", m);
    if (f.profile) detail::from_config(cfg, f.profile, "profile", profile);
    if (f.p) detail::from_config(cfg, f.p, "p", p);
    if (f.alpha) detail::from_config(cfg, f.alpha, "alpha", alpha);
    if (f.samples) detail::from_config(cfg, f.samples, "samples", samples);
    if (f.count) detail::from_config(cfg, f.count, "count", count);

    if (name == "estimate" || name == "sure") {
      if (input.empty()) throw InvalidInput("--input is required");
      const auto spec_list = detail::expand_list(specs);
      if (spec_list.size() != 1) throw InvalidInput("exactly one --spec is required");
      const EstimatorSpec spec = parse_estimator_spec(spec_list.front());
      const Matrix x = read_matrix_csv_file(input);
      detail::Sink sink(out_path, out);
      if (name == "estimate") {
        write_matrix_csv(sink.get(), apply_estimator(spec, x));
      } else {
        require_tall(x, "sure");
        const double value =
            sure(spec, singular_values(x), static_cast<int>(x.rows()), static_cast<int>(x.cols()));
        sink.get() << format_double(value) << '\n';
      }
      return kExitOk;
    }

    if (name == "risk-sweep") {
      auto r = detail::resolve_scenario(scenario, n, m, profile, grid);
      const auto spec_text = f.spec->count() > 0 || cfg.contains("spec") ? detail::expand_list(specs) : r.specs;
      const auto prior_text = detail::expand_list(priors);
      if (spec_text.empty() && prior_text.empty()) throw InvalidInput("no estimators given");
      std::vector<EstimatorSpec> parsed;
      for (const auto& s : spec_text) parsed.push_back(parse_estimator_spec(s));
      std::vector<PriorSpec> parsed_priors;
      for (const auto& s : prior_text) parsed_priors.push_back(parse_prior_spec(s));
      const std::uint64_t reps = replicates ? replicates : 10000;

      auto rows = parsed.empty() ? std::vector<RiskRow>{} : risk_sweep(parsed, r.scenario, r.grid, reps, seed, threads);
      if (!parsed_priors.empty()) {
        ISConfig is;
        is.num_samples = is_samples ? is_samples : 1000;
        is.seed = seed;
        std::vector<RiskRow> merged;
        std::size_t next = 0;
        for (double g : r.grid) {
          for (; next < rows.size() && rows[next].grid_value == g; ++next) merged.push_back(rows[next]);
          const Matrix mean = scenario_mean(r.scenario, g);
          for (const auto& prior : parsed_priors)
            merged.push_back({r.scenario.name, "bayes:" + to_string(prior), g,
                              mc_bayes_frobenius_risk(prior, mean, reps, is, seed, threads)});
        }
        rows = std::move(merged);
      }
      detail::Sink sink(out_path, out);
      write_risk_csv(sink.get(), rows);
      return kExitOk;
    }

    if (name == "predict-risk") {
      auto r = detail::resolve_scenario(scenario, n, m, profile, grid);
      const auto prior_text =
          f.prior->count() > 0 || cfg.contains("prior") ? detail::expand_list(priors) : r.priors;
      if (prior_text.empty()) throw InvalidInput("no priors given");
      std::vector<PriorSpec> parsed;
      for (const auto& s : prior_text) parsed.push_back(parse_prior_spec(s));
      ISConfig is;
      is.num_samples = is_samples ? is_samples : 10000;
      is.seed = seed;
      const std::uint64_t reps = replicates ? replicates : 1000;

      std::vector<KlRow> rows;
      for (double g : r.grid) {
        const Matrix mean = scenario_mean(r.scenario, g);
        const Vector sigma = r.scenario.profile(g);
        const auto reports = kl_risk(parsed, mean, reps, is, seed, threads);
        for (std::size_t j = 0; j < parsed.size(); ++j) {
          KlRow row;
          row.prior = to_string(parsed[j]);
          for (int i = 0; i < 3 && i < sigma.size(); ++i) row.sigma[i] = sigma(i);
          row.replicates = reps;
          row.is_samples = is.num_samples;
          row.seed = seed;
          row.kl_mean = reports[j].risk.mean;
          row.kl_stderr = reports[j].risk.stderr;
          row.min_ess_fraction = reports[j].min_ess_fraction;
          rows.push_back(row);
        }
      }
      detail::Sink sink(out_path, out);
      write_kl_csv(sink.get(), rows);
      return kExitOk;
    }

    if (name == "check-prior") {
      for (const auto& [opt, key] : {std::pair{f.p, "p"}, std::pair{f.alpha, "alpha"}, std::pair{f.n, "n"},
                                     std::pair{f.m, "m"}})
        if (opt->count() == 0 && !cfg.contains(key)) throw InvalidInput(std::string("--") + key + " is required");
      const auto report = scan_superharmonicity(p, alpha, n, m, samples, seed, threads);
      detail::Sink sink(out_path, out);
      auto& o = sink.get();
      o << "p=" << format_double(p) << " alpha=" << format_double(alpha) << " n=" << n << " m=" << m
        << " seed=" << seed << '\n';
      if (p > 0.0 && p <= 2.0) o << "sufficient_alpha_bound=" << format_double(superharmonic_alpha_upper_bound(p, n, m)) << '\n';
      o << "evaluated=" << report.evaluated << " violations=" << report.violations << '\n';
      o << "max_laplacian_over_density=" << format_double(report.max_laplacian) << " at sigma=";
      for (Eigen::Index i = 0; i < report.argmax_sigma.size(); ++i)
        o << (i ? ";" : "") << format_double(report.argmax_sigma(i));
      o << '\n' << (report.violations == 0 ? "superharmonic on all evaluated points" : "NOT superharmonic") << '\n';
      return report.violations == 0 ? kExitOk : kExitCheckFailed;
    }

    // verify-lemmas
    const auto random = fuzz_all(count, seed, threads);
    const auto ties = fuzz_near_ties(count, seed, threads);
    detail::Sink sink(out_path, out);
    auto& o = sink.get();
    for (std::size_t i = 0; i < random.lemmas.size(); ++i) {
      const auto& a = random.lemmas[i];
      const auto& b = ties.lemmas[i];
      o << a.name << " passed=" << a.passed << " failed=" << a.failed
        << " worst_relative_margin=" << format_double(a.worst_relative_margin) << " near_tie_passed=" << b.passed
        << " near_tie_failed=" << b.failed << '\n';
    }
    return random.clean() && ties.clean() ? kExitOk : kExitCheckFailed;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Unsupported& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << " (after " << e.iterations() << " sweeps)\n";
    return kExitNumerical;
  } catch (const DegenerateWeights& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace matnorm::cli
