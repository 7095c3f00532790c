#include "pm/matchers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "pm/errors.hpp"

namespace pm {

namespace {

std::vector<std::string_view> split_words(const std::string& text) {
  std::vector<std::string_view> out;
  std::string_view s(text);
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto end = std::min(s.find(' ', pos), s.size());
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

}  // namespace

TfidfModel fit_tfidf(std::span<const NormalizedTitle> corpus) {
  if (corpus.empty()) throw DomainError("cannot fit tf-idf on an empty corpus");

  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : corpus) {
    const auto set = tokenize(doc);
    for (const auto& token : set.tokens()) ++df[token];
  }

  TfidfModel model;
  model.doc_count = corpus.size();
  model.idf.reserve(df.size());
  const double n = static_cast<double>(corpus.size());
  for (const auto& [token, count] : df) {
    model.vocabulary.emplace(token, model.idf.size());
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

std::vector<std::pair<std::size_t, double>> tfidf_vector(const TfidfModel& model,
                                                         const NormalizedTitle& title) {
  std::map<std::size_t, double> counts;
  for (const auto word : split_words(title.text())) {
    if (const auto it = model.vocabulary.find(word); it != model.vocabulary.end()) counts[it->second] += 1.0;
  }
  std::vector<std::pair<std::size_t, double>> vec;
  vec.reserve(counts.size());
  double norm2 = 0.0;
  for (const auto& [index, tf] : counts) {
    const double w = tf * model.idf[index];
    vec.emplace_back(index, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double norm = std::sqrt(norm2);
    for (auto& [_, w] : vec) w /= norm;
  }
  return vec;
}

double tfidf_cosine(const TfidfModel& model, const NormalizedTitle& a, const NormalizedTitle& b) {
  const auto va = tfidf_vector(model, a);
  const auto vb = tfidf_vector(model, b);
  if (va.empty() || vb.empty()) return 0.0;
  // identical vectors score exactly 1 regardless of rounding in the dot product
  if (va == vb) return 1.0;
  double dot = 0.0;
  auto ia = va.begin();
  auto ib = vb.begin();
  while (ia != va.end() && ib != vb.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot, 0.0, 1.0);
}

std::string_view to_string(Scorer scorer) noexcept {
  return scorer == Scorer::jaccard ? "jaccard" : "tfidf";
}

std::optional<Scorer> scorer_from_string(std::string_view name) noexcept {
  if (name == "tfidf" || name == "tfidf_cosine") return Scorer::tfidf_cosine;
  if (name == "jaccard") return Scorer::jaccard;
  return std::nullopt;
}

MatchPrediction score_pair(const ThresholdMatcher& matcher, const OfferPair& pair) {
  const auto left = normalize_title(pair.title_left);
  const auto right = normalize_title(pair.title_right);
  double score = 0.0;
  switch (matcher.scorer) {
    case Scorer::tfidf_cosine:
      if (!matcher.model) throw ConfigError("tf-idf matcher has no fitted model");
      score = tfidf_cosine(*matcher.model, left, right);
      break;
    case Scorer::jaccard:
      score = jaccard(tokenize(left), tokenize(right));
      break;
  }
  return MatchPrediction{pair.pair_id, score, score >= matcher.threshold ? 1 : 0};
}

double tune_threshold(std::span<const ScoredLabel> scores) {
  std::int64_t total_pos = 0;
  for (const auto& s : scores) total_pos += s.label == 1 ? 1 : 0;
  const auto total_neg = static_cast<std::int64_t>(scores.size()) - total_pos;
  if (total_pos == 0 || total_neg == 0)
    throw DomainError("threshold tuning needs at least one positive and one negative label");

  std::vector<ScoredLabel> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score > b.score; });

  // Sweep candidates from the largest down; tp/fp count scores >= candidate.
  // F1 = 2tp / (2tp + fp + fn) is compared exactly by cross-multiplication.
  double best_threshold = 0.0;
  std::int64_t best_num = -1;
  std::int64_t best_den = 1;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::size_t i = 0;
  auto consider = [&](double candidate) {
    const std::int64_t num = 2 * tp;
    const std::int64_t den = 2 * tp + fp + (total_pos - tp);
    // den > 0 always: total_pos >= 1
    if (best_num < 0 || num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_threshold = candidate;
    }
  };
  while (i < sorted.size()) {
    const double candidate = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == candidate) {
      (sorted[i].label == 1 ? tp : fp) += 1;
      ++i;
    }
    if (candidate < 0.0) break;  // 0 dominates every negative candidate
    consider(candidate);
  }
  // 0 admits every score >= 0; skip if it was already an observed score
  if (!std::any_of(sorted.begin(), sorted.end(), [](const auto& s) { return s.score == 0.0; })) {
    tp = fp = 0;
    for (const auto& s : sorted)
      if (s.score >= 0.0) (s.label == 1 ? tp : fp) += 1;
    consider(0.0);
  }
  return best_threshold;
}

}  // namespace pm
