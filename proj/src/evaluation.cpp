#include "pm/evaluation.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "pm/errors.hpp"

namespace pm {

Metrics metrics_from_counts(const ConfusionCounts& c) noexcept {
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  Metrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  const double pr = m.precision + m.recall;
  m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
  return m;
}

ConfusionCounts confusion(std::span<const MatchPrediction> predictions, std::span<const LabeledPair> labels) {
  if (predictions.size() != labels.size()) {
    throw Error("prediction/label count mismatch: " + std::to_string(predictions.size()) + " vs " +
                std::to_string(labels.size()));
  }
  std::unordered_map<std::string_view, int> by_id;
  by_id.reserve(labels.size());
  for (const auto& l : labels) {
    if (!by_id.emplace(l.pair_id, l.label).second) throw Error("duplicate labeled pair_id '" + l.pair_id + "'");
  }
  ConfusionCounts c;
  for (const auto& p : predictions) {
    const auto it = by_id.find(p.pair_id);
    if (it == by_id.end()) throw Error("prediction for unknown pair_id '" + p.pair_id + "'");
    if (it->second < 0) throw Error("duplicate prediction for pair_id '" + p.pair_id + "'");
    const bool truth = it->second == 1;
    const bool predicted = p.decision == 1;
    if (truth && predicted) ++c.tp;
    else if (!truth && predicted) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
    it->second = -1;
  }
  return c;
}

Metrics compute_metrics(std::span<const MatchPrediction> predictions, std::span<const LabeledPair> labels) {
  return metrics_from_counts(confusion(predictions, labels));
}

namespace {

double log_beta(double a, double b) {
  int sign = 0;
  return ::lgamma_r(a, &sign) + ::lgamma_r(b, &sign) - ::lgamma_r(a + b, &sign);
}

// Continued fraction for I_x(a, b), modified Lentz. Converges fast for
// x < (a + 1) / (a + b + 2); callers use the symmetry relation otherwise.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs a > 0 and b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta needs 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double x, double df) {
  if (!(df > 0.0)) throw DomainError("t distribution needs df > 0");
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
  return x > 0.0 ? 1.0 - tail : tail;
}

double t_ppf(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("t_ppf needs 0 < p < 1");
  if (!(df >= 1.0)) throw DomainError("t_ppf needs df >= 1");
  if (p == 0.5) return 0.0;

  double lo = -50.0;
  double hi = 50.0;
  while (t_cdf(lo, df) > p) {
    hi = lo;
    lo *= 2.0;
  }
  while (t_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 2000; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (t_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

double standard_error(double sigma, std::size_t n, double conf) {
  if (n < 2) throw DomainError("standard error needs at least 2 runs");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
  if (!(conf > 0.0 && conf < 1.0)) throw DomainError("confidence level must be in (0, 1)");
  if (sigma == 0.0) return 0.0;
  return t_ppf((1.0 + conf) / 2.0, static_cast<double>(n - 1)) * sigma;
}

EvalAggregate aggregate_runs(std::span<const Metrics> runs, double conf) {
  if (runs.size() < 2) throw DomainError("aggregation needs at least 2 runs, got " + std::to_string(runs.size()));
  EvalAggregate agg;
  agg.runs.assign(runs.begin(), runs.end());
  agg.conf = conf;
  agg.n = runs.size();
  const double n = static_cast<double>(runs.size());
  for (const auto& r : runs) {
    agg.mean_f1 += r.f1;
    agg.mean_precision += r.precision;
    agg.mean_recall += r.recall;
    agg.mean_accuracy += r.accuracy;
  }
  agg.mean_f1 /= n;
  agg.mean_precision /= n;
  agg.mean_recall /= n;
  agg.mean_accuracy /= n;

  double ss = 0.0;
  for (const auto& r : runs) ss += (r.f1 - agg.mean_f1) * (r.f1 - agg.mean_f1);
  agg.sigma = std::sqrt(ss / (n - 1.0));
  agg.std_err_f1 = standard_error(agg.sigma, agg.n, conf);
  return agg;
}

}  // namespace pm
