#pragma once

#include <stdexcept>
#include <string>

namespace matnorm {

/// Malformed arguments: wrong shapes, parameters outside their domain,
/// non-finite entries.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input lies on a set where the requested quantity is undefined
/// (zero matrix for a norm-shrinker, zero singular value under a log, ...).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested combination is well-formed but not provided (e.g. the unbiased
/// risk estimate of a positive-part rule, which is not smooth).
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int iterations)
      : std::runtime_error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// Importance weights collapsed onto too few samples.
class DegenerateWeights : public std::runtime_error {
 public:
  DegenerateWeights(const std::string& what, double ess_fraction)
      : std::runtime_error(what), ess_fraction_(ess_fraction) {}

  double ess_fraction() const noexcept { return ess_fraction_; }

 private:
  double ess_fraction_;
};

}  // namespace matnorm
