#pragma once

// Test-only helpers: synthetic offer dumps, a brute-force negative-mining
// oracle, and scratch directories.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <unistd.h>
#include <vector>

#include "pm/ingest.hpp"
#include "pm/pairs.hpp"
#include "pm/textprep.hpp"

namespace pm::testing {

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pm_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct DumpShape {
  std::vector<std::string> categories{"chemia", "napoje"};
  std::size_t products_per_category = 120;
  std::size_t min_sellers = 2;
  std::size_t max_sellers = 4;
  std::size_t vocabulary = 60;
  std::uint64_t seed = 7;
  /// Fraction of extra noise rows (missing fields, duplicates, single-store EANs).
  double noise = 0.0;
};

/// Offers of made-up products: each product (EAN) is listed by several
/// sellers with perturbed titles drawn from a small shared vocabulary, so
/// cross-product titles overlap and Jaccard ties are common.
inline std::vector<RawOfferRecord> synthetic_records(const DumpShape& shape) {
  std::mt19937_64 rng(shape.seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::vector<std::string> sellers{"Auchan", "Carrefour", "Frisco", "Rossmann", "Hebe", "Biedronka"};
  const std::vector<std::string> suffixes{"", " 0,5L", " 1L", " (promo)", " - ZESTAW", " 500ml"};

  std::vector<RawOfferRecord> out;
  std::size_t row = 0;
  std::uint64_t ean = 5900000000000ULL;
  auto add = [&](std::string id, std::string e, std::string seller, std::string title, std::string category) {
    RawOfferRecord r;
    r.source_row = row++;
    r.fields.emplace("id", std::move(id));
    if (!e.empty()) r.fields.emplace("ean", std::move(e));
    if (!seller.empty()) r.fields.emplace("seller", std::move(seller));
    if (!title.empty()) r.fields.emplace("title", std::move(title));
    r.fields.emplace("category", std::move(category));
    out.push_back(std::move(r));
  };

  for (const auto& category : shape.categories) {
    for (std::size_t p = 0; p < shape.products_per_category; ++p) {
      const std::string code = std::to_string(ean++);
      std::vector<std::string> words;
      const std::size_t len = 3 + pick(3);
      for (std::size_t w = 0; w < len; ++w) words.push_back("w" + std::to_string(pick(shape.vocabulary)));
      const std::size_t nsellers = shape.min_sellers + pick(shape.max_sellers - shape.min_sellers + 1);
      std::vector<std::string> chosen = sellers;
      for (std::size_t i = chosen.size(); i > 1; --i) std::swap(chosen[i - 1], chosen[pick(i)]);
      for (std::size_t s = 0; s < nsellers; ++s) {
        std::string title;
        for (std::size_t w = 0; w < words.size(); ++w) {
          if (words.size() > 3 && pick(5) == 0) continue;  // sellers abbreviate
          if (!title.empty()) title += ' ';
          title += pick(4) == 0 ? "W" + words[w].substr(1) : words[w];
        }
        title += suffixes[pick(suffixes.size())];
        add("o" + std::to_string(row), code, chosen[s], title, category);
      }
      if (shape.noise > 0.0 && static_cast<double>(rng() % 1000) < shape.noise * 1000.0) {
        switch (pick(3)) {
          case 0: add("o" + std::to_string(row), code, "", "no seller", category); break;
          case 1: add("o" + std::to_string(row), code, chosen[0], "duplicate listing", category); break;
          default: add("o" + std::to_string(row), std::to_string(ean++), chosen[0], "lonely", category); break;
        }
      }
    }
  }
  return out;
}

inline OfferTable synthetic_table(const DumpShape& shape) {
  return clean_offers(synthetic_records(shape), CleaningRules{});
}

/// Small random table for oracle comparisons: few words per title so many
/// scores tie, few offers per EAN.
inline OfferTable random_table(std::uint64_t seed, std::size_t max_offers) {
  std::mt19937_64 rng(seed);
  const std::size_t n = 2 + rng() % (max_offers - 1);
  const std::size_t vocab = 3 + rng() % 15;
  const std::size_t categories = 1 + rng() % 3;
  const std::size_t eans = 1 + rng() % std::max<std::size_t>(1, n / 2);
  OfferTable t;
  for (std::size_t i = 0; i < n; ++i) {
    Offer o;
    o.id = "x" + std::to_string(rng() % 100000) + "_" + std::to_string(i);
    o.ean = "e" + std::to_string(rng() % eans);
    o.seller = "s" + std::to_string(i);
    o.category = "c" + std::to_string(std::stoul(o.ean.substr(1)) % categories);
    const std::size_t words = rng() % 5;  // may be empty
    for (std::size_t w = 0; w < words; ++w) o.title += (w ? " " : "") + ("t" + std::to_string(rng() % vocab));
    if (o.title.empty()) o.title = "!";
    t.offers.push_back(std::move(o));
  }
  return t;
}

/// Exhaustive oracle for hard-negative mining: score every ordered pair of
/// offers with std::set token sets, rank each offer's full candidate list,
/// take the first k, and canonicalize.
inline std::set<std::pair<std::string, std::string>> brute_force_negatives(const OfferTable& table, std::size_t k) {
  auto token_set = [](const std::string& title) {
    std::set<std::string> s;
    std::istringstream in(normalize_title(title).text());
    for (std::string w; in >> w;) s.insert(w);
    return s;
  };
  std::vector<std::set<std::string>> sets;
  for (const auto& o : table.offers) sets.push_back(token_set(o.title));

  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < table.offers.size(); ++i) {
    std::vector<std::pair<double, std::string>> ranked;
    for (std::size_t j = 0; j < table.offers.size(); ++j) {
      const auto& a = table.offers[i];
      const auto& b = table.offers[j];
      if (i == j || a.ean == b.ean || a.category != b.category) continue;
      std::size_t common = 0;
      for (const auto& w : sets[i]) common += sets[j].count(w);
      const std::size_t uni = sets[i].size() + sets[j].size() - common;
      const double score = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
      ranked.emplace_back(score, b.id);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
      const auto& a = table.offers[i].id;
      const auto& b = ranked[r].second;
      out.emplace(std::min(a, b), std::max(a, b));
    }
  }
  return out;
}

inline std::set<std::pair<std::string, std::string>> pair_keys(const std::vector<OfferPair>& pairs) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& p : pairs) out.emplace(p.id_left, p.id_right);
  return out;
}

/// Random pair dataset with odd titles and extra attributes, for round-trip checks.
inline PairDataset random_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> pieces{"Nikon", "D750", "body", "Płyn", "do", "naczyń", "\"quoted\"", "a\\b",
                                        "tab\there", "ünïcödé", "500ml", "Łódź", "x", "€9,99", "🙂"};
  PairDataset ds;
  ds.name = "random" + std::to_string(seed);
  const std::size_t n = rng() % 40;
  for (std::size_t i = 0; i < n; ++i) {
    OfferPair p;
    p.id_left = "L" + std::to_string(rng() % 1000);
    p.id_right = "R" + std::to_string(rng() % 1000);
    p.pair_id = make_pair_id(p.id_left, p.id_right) + "_" + std::to_string(i);
    auto title = [&] {
      std::string t;
      const std::size_t w = 1 + rng() % 6;
      for (std::size_t k = 0; k < w; ++k) t += (k ? " " : "") + pieces[rng() % pieces.size()];
      return t;
    };
    p.title_left = title();
    p.title_right = title();
    if (rng() % 2) {
      p.ean_left = std::to_string(rng() % 100);
      p.ean_right = std::to_string(rng() % 100);
    }
    p.category = rng() % 3 ? "Camera_and_Photo" : "";
    p.label = static_cast<int>(rng() % 2);
    if (rng() % 3 == 0) p.attributes.emplace("cluster_id_left", std::to_string(rng() % 50));
    if (rng() % 4 == 0) p.attributes.emplace("description_left", "\"Opis z \\\"cudzysłowem\\\"\"");
    if (rng() % 5 == 0) p.attributes.emplace("price_left", "null");
    if (rng() % 5 == 0) p.attributes.emplace("category_right", "\"Other\"");
    ds.pairs.push_back(std::move(p));
  }
  return ds;
}

}  // namespace pm::testing
