#pragma once

// Built-in experiment protocols: mean-matrix profiles, default grids and the
// estimators or priors compared on them.

#include "matnorm/errors.hpp"
#include "matnorm/format.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/risk.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace matnorm {

struct ScenarioDefinition {
  SingularValueScenario scenario;
  std::vector<double> default_grid;
  std::vector<std::string> default_estimators;
  std::vector<std::string> default_priors;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 1) throw InvalidInput("linspace: count must be >= 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

/// Grid text: "1,10,100" or "lo:hi:count".
inline std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw InvalidInput("grid: expected lo:hi:count");
    return linspace(parse_double(parts[0]), parse_double(parts[1]), parse_uint64(parts[2]));
  }
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_double(part));
  if (out.empty()) throw InvalidInput("grid: empty");
  return out;
}

/// Profile rule: m comma-separated terms, each a constant ("3"), the grid
/// value ("x") or a multiple of it ("0.8x", "0.8*x").
inline SingularValueScenario custom_scenario(int n, int m, std::string_view rule) {
  validate_dimensions(n, m, "custom scenario");
  struct Term {
    double coef = 0.0;
    double constant = 0.0;
  };
  std::vector<Term> terms;
  for (auto part : split(rule, ',')) {
    part = trim(part);
    Term t;
    if (!part.empty() && part.back() == 'x') {
      part.remove_suffix(1);
      part = trim(part);
      if (!part.empty() && part.back() == '*') part.remove_suffix(1);
      t.coef = trim(part).empty() ? 1.0 : parse_double(part);
    } else {
      t.constant = parse_double(part);
    }
    terms.push_back(t);
  }
  if (static_cast<int>(terms.size()) != m)
    throw InvalidInput("profile rule has " + std::to_string(terms.size()) + " terms, expected m = " +
                       std::to_string(m));
  SingularValueScenario s;
  s.name = "custom";
  s.n = n;
  s.m = m;
  s.profile = [terms](double x) {
    Vector out(static_cast<Eigen::Index>(terms.size()));
    for (std::size_t i = 0; i < terms.size(); ++i) out(static_cast<Eigen::Index>(i)) = terms[i].coef * x + terms[i].constant;
    return out;
  };
  return s;
}

inline const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = {"fig1a", "fig1b", "fig2", "table1-top", "table1-bottom",
                                                 "fig3a", "fig3b"};
  return names;
}

inline ScenarioDefinition builtin_scenario(std::string_view name) {
  // Shared by Table 1 and the fig2 comparison.
  const std::vector<std::string> table_specs = {"mem+", "em+", "sure:p=0.5+", "nns+", "sure:p=1+", "js+"};
  const std::vector<std::string> fig1_specs = {"nns", "js", "em", "mn:p=2,alpha=0"};
  const std::vector<std::string> fig3_priors = {"uniform", "stein", "svs", "nns"};

  ScenarioDefinition d;
  auto& s = d.scenario;
  s.name = std::string(name);
  if (name == "fig1a" || name == "fig3a") {
    s.n = 5;
    s.m = 3;
    s.grid_parameter = "sigma2";
    s.profile = [](double x) { return Vector{{20.0, x, 0.0}}; };
    d.default_grid = name == "fig1a" ? linspace(0.0, 20.0, 20) : std::vector<double>{0.0, 5.0, 20.0};
  } else if (name == "fig1b" || name == "fig3b") {
    s.n = 5;
    s.m = 3;
    s.profile = [](double x) { return Vector{{x, 0.0, 0.0}}; };
    d.default_grid = name == "fig1b" ? linspace(0.0, 20.0, 20) : std::vector<double>{1.0, 10.0, 30.0};
  } else if (name == "fig2" || name == "table1-bottom") {
    s.n = 100;
    s.m = 20;
    s.profile = [](double x) {
      Vector out = Vector::Zero(20);
      for (int i = 0; i < 5; ++i) out(i) = x * (1.0 - i / 5.0);
      return out;
    };
    d.default_grid = name == "fig2" ? linspace(0.0, 50.0, 20) : std::vector<double>{1.0, 10.0, 100.0, 1000.0, 10000.0};
  } else if (name == "table1-top") {
    s.n = 20;
    s.m = 15;
    s.profile = [](double x) {
      Vector out = Vector::Zero(15);
      out.head(10).setConstant(x);
      return out;
    };
    d.default_grid = {1.0, 10.0, 100.0, 1000.0};
  } else {
    throw InvalidInput("unknown scenario '" + std::string(name) + "'");
  }
  d.default_estimators = name.substr(0, 4) == "fig1" ? fig1_specs : table_specs;
  d.default_priors = fig3_priors;
  return d;
}

}  // namespace matnorm
