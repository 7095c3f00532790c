#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pm/pairs.hpp"
#include "pm/textprep.hpp"

namespace pm {

/// Smoothed inverse document frequencies over a title corpus:
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1.
struct TfidfModel {
  /// token -> dense index, assigned in lexicographic token order
  std::map<std::string, std::size_t, std::less<>> vocabulary;
  std::vector<double> idf;
  std::size_t doc_count = 0;

  friend bool operator==(const TfidfModel&, const TfidfModel&) = default;
};

/// Throws DomainError on an empty corpus.
TfidfModel fit_tfidf(std::span<const NormalizedTitle> corpus);

/// Sparse L2-normalized tf-idf vector (raw counts × idf), sorted by index.
/// Out-of-vocabulary tokens are dropped; a title with no known token maps
/// to the empty vector.
std::vector<std::pair<std::size_t, double>> tfidf_vector(const TfidfModel& model,
                                                         const NormalizedTitle& title);

/// Cosine of the tf-idf vectors of two titles, clamped to [0, 1]; 0 when
/// either vector is empty.
double tfidf_cosine(const TfidfModel& model, const NormalizedTitle& a, const NormalizedTitle& b);

enum class Scorer { tfidf_cosine, jaccard };

std::string_view to_string(Scorer scorer) noexcept;
std::optional<Scorer> scorer_from_string(std::string_view name) noexcept;

struct ThresholdMatcher {
  Scorer scorer = Scorer::tfidf_cosine;
  double threshold = 0.5;
  std::optional<TfidfModel> model;  // required for tfidf_cosine
};

struct MatchPrediction {
  std::string pair_id;
  double score = 0.0;
  int decision = 0;

  friend bool operator==(const MatchPrediction&, const MatchPrediction&) = default;
};

/// Normalizes both titles and scores them; decision = score >= threshold.
/// Throws ConfigError for a tf-idf matcher without a fitted model.
MatchPrediction score_pair(const ThresholdMatcher& matcher, const OfferPair& pair);

struct ScoredLabel {
  double score = 0.0;
  int label = 0;
};

/// Threshold maximizing F1 of `score >= threshold` over the candidates
/// {observed scores} ∪ {0}; equal F1 resolves to the larger threshold.
/// Throws DomainError unless both labels occur.
double tune_threshold(std::span<const ScoredLabel> scores);

}  // namespace pm
