#include <cmath>
#include <random>

#include "doctest.h"
#include "pm/errors.hpp"
#include "pm/matchers.hpp"

using namespace pm;

namespace {

std::vector<NormalizedTitle> corpus_of(std::initializer_list<const char*> titles) {
  std::vector<NormalizedTitle> out;
  for (const auto* t : titles) out.push_back(normalize_title(t));
  return out;
}

OfferPair pair_of(std::string left, std::string right) {
  OfferPair p;
  p.pair_id = "p";
  p.title_left = std::move(left);
  p.title_right = std::move(right);
  return p;
}

// Reference F1 for one threshold, by direct counting.
double f1_at(std::span<const ScoredLabel> s, double t) {
  double tp = 0, fp = 0, fn = 0;
  for (const auto& x : s) {
    const bool yes = x.score >= t;
    tp += yes && x.label == 1;
    fp += yes && x.label == 0;
    fn += !yes && x.label == 1;
  }
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

}  // namespace

TEST_CASE("tf-idf cosine agrees with scikit-learn") {
  // TfidfVectorizer(token_pattern=r"(?u)\b\w+\b"), cosine_similarity
  const auto c1 = corpus_of({"a b", "b c", "c"});
  const auto m1 = fit_tfidf(c1);
  CHECK(m1.doc_count == 3);
  CHECK(tfidf_cosine(m1, c1[0], c1[1]) == doctest::Approx(0.4280460350631186).epsilon(1e-12));

  const auto c2 = corpus_of({"a a b", "b c", "c", "d e f", "a"});
  const auto m2 = fit_tfidf(c2);
  CHECK(tfidf_cosine(m2, normalize_title("a a b"), normalize_title("b c d")) ==
        doctest::Approx(0.23781578157685004).epsilon(1e-12));
}

TEST_CASE("tf-idf model shape") {
  const auto m = fit_tfidf(corpus_of({"b a", "c b"}));
  REQUIRE(m.vocabulary.size() == 3);
  CHECK(m.vocabulary.at("a") == 0);
  CHECK(m.vocabulary.at("b") == 1);
  CHECK(m.vocabulary.at("c") == 2);
  CHECK(m.idf[1] == doctest::Approx(1.0));  // ln(3/3) + 1
  CHECK(m.idf[0] == doctest::Approx(std::log(1.5) + 1));
  const auto v = tfidf_vector(m, normalize_title("a a zzz"));
  REQUIRE(v.size() == 1);
  CHECK(v[0].first == 0);
  CHECK(v[0].second == doctest::Approx(1.0));
  CHECK(tfidf_vector(m, normalize_title("zzz")).empty());
  CHECK_THROWS_AS(fit_tfidf({}), DomainError);
}

TEST_CASE("tf-idf cosine properties") {
  std::mt19937_64 rng(5);
  auto title = [&] {
    std::string t;
    const auto n = rng() % 6;
    for (std::size_t i = 0; i < n; ++i) t += "w" + std::to_string(rng() % 12) + " ";
    return normalize_title(t);
  };
  for (int round = 0; round < 200; ++round) {
    std::vector<NormalizedTitle> corpus;
    const auto n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) corpus.push_back(title());
    const auto m = fit_tfidf(corpus);
    for (int q = 0; q < 10; ++q) {
      const auto a = title();
      const auto b = title();
      const double ab = tfidf_cosine(m, a, b);
      CHECK(ab == tfidf_cosine(m, b, a));
      CHECK(ab >= 0.0);
      CHECK(ab <= 1.0);
      const bool a_known = !tfidf_vector(m, a).empty();
      CHECK(tfidf_cosine(m, a, a) == (a_known ? 1.0 : 0.0));
      if (!a_known) CHECK(ab == 0.0);
    }
  }
  const auto m = fit_tfidf(corpus_of({"x y"}));
  CHECK(tfidf_cosine(m, normalize_title(""), normalize_title("")) == 0.0);
}

TEST_CASE("score_pair uses the configured scorer") {
  ThresholdMatcher j{Scorer::jaccard, 0.5, std::nullopt};
  const auto p = score_pair(j, pair_of("Coca-Cola ZERO", "coca cola light"));
  CHECK(p.pair_id == "p");
  CHECK(p.score == doctest::Approx(0.5));  // {coca, cola} / {coca, cola, zero, light}
  CHECK(p.decision == 1);
  j.threshold = 0.51;
  CHECK(score_pair(j, pair_of("Coca-Cola ZERO", "coca cola light")).decision == 0);

  ThresholdMatcher t{Scorer::tfidf_cosine, 0.5, std::nullopt};
  CHECK_THROWS_AS(score_pair(t, pair_of("a", "b")), ConfigError);
  t.model = fit_tfidf(corpus_of({"a b", "b c", "c"}));
  CHECK(score_pair(t, pair_of("A B", "b c")).score == doctest::Approx(0.4280460350631186));

  CHECK(to_string(Scorer::tfidf_cosine) == "tfidf");
  CHECK(scorer_from_string("jaccard") == Scorer::jaccard);
  CHECK_FALSE(scorer_from_string("bert").has_value());
}

TEST_CASE("tune_threshold examples") {
  const std::vector<ScoredLabel> clean{{0.9, 1}, {0.8, 1}, {0.3, 0}, {0.1, 0}};
  CHECK(tune_threshold(clean) == 0.8);  // F1 = 1 for t in (0.3, 0.8]; larger candidate wins

  const std::vector<ScoredLabel> mixed{{0.9, 1}, {0.7, 0}, {0.6, 1}, {0.2, 0}};
  // t=0.9: F1 2/3; t=0.6: F1 0.8; t=0.2: F1 2/3
  CHECK(tune_threshold(mixed) == 0.6);

  const std::vector<ScoredLabel> zeros{{0.0, 1}, {0.0, 0}};
  CHECK(tune_threshold(zeros) == 0.0);

  const std::vector<ScoredLabel> one_class{{0.5, 1}, {0.6, 1}};
  CHECK_THROWS_AS(tune_threshold(one_class), DomainError);
}

TEST_CASE("tune_threshold is optimal over the candidate set") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 300; ++round) {
    std::vector<ScoredLabel> s;
    const auto n = 2 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) s.push_back({static_cast<double>(rng() % 11) / 10.0, static_cast<int>(rng() % 2)});
    s[0].label = 1;
    s[1].label = 0;
    const double t = tune_threshold(s);
    const double best = f1_at(s, t);
    bool candidate = t == 0.0;
    for (const auto& x : s) {
      candidate = candidate || x.score == t;
      const double other = f1_at(s, x.score);
      CHECK(other <= best + 1e-12);
      if (std::abs(other - best) <= 1e-12) CHECK(x.score <= t);
    }
    CHECK(candidate);
  }
}
