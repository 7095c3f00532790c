#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pm/matchers.hpp"

namespace pm {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
};

/// All values in [0, 1]; 0/0 ratios are 0.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Metrics metrics_from_counts(const ConfusionCounts& counts) noexcept;

struct LabeledPair {
  std::string pair_id;
  int label = 0;
};

/// Tallies predictions against labels matched by pair id. Throws Error on a
/// length mismatch, a duplicate id or an id without a counterpart.
ConfusionCounts confusion(std::span<const MatchPrediction> predictions, std::span<const LabeledPair> labels);

Metrics compute_metrics(std::span<const MatchPrediction> predictions, std::span<const LabeledPair> labels);

/// Student t cumulative distribution, via the regularized incomplete beta.
double t_cdf(double x, double df);

/// Student t percent point function (inverse CDF). The root of
/// t_cdf(x) = p is bracketed by doubling outward from [-50, 50] and then
/// bisected to machine resolution. Throws DomainError unless 0 < p < 1 and df >= 1.
double t_ppf(double p, double df);

/// Regularized incomplete beta I_x(a, b), continued fraction by modified Lentz.
double incomplete_beta(double a, double b, double x);

/// t_ppf((1 + conf) / 2, n - 1) × sigma. Note there is no 1/√n factor: this
/// is the interval half-width for a single run, not for the mean.
/// Throws DomainError for n < 2, sigma < 0 or conf outside (0, 1).
double standard_error(double sigma, std::size_t n, double conf);

struct EvalAggregate {
  std::vector<Metrics> runs;
  double mean_f1 = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_accuracy = 0.0;
  double sigma = 0.0;       // sample (n - 1) standard deviation of F1
  double std_err_f1 = 0.0;  // standard_error(sigma, n, conf)
  double conf = 0.95;
  std::size_t n = 0;
};

/// Throws DomainError for fewer than two runs.
EvalAggregate aggregate_runs(std::span<const Metrics> runs, double conf = 0.95);

}  // namespace pm
