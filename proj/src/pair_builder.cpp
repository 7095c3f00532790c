#include "pm/pair_builder.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "pm/errors.hpp"
#include "pm/io.hpp"
#include "pm/random.hpp"
#include "pm/textprep.hpp"

namespace pm {

void SplitPlan::validate() const {
  if (ratios.small == 0 || ratios.medium == 0 || ratios.large == 0)
    throw ConfigError("split ratios must be positive");
  if (ratios.small > ratios.medium || ratios.medium > ratios.large)
    throw ConfigError("split ratios must satisfy small <= medium <= large");
  if (k_negatives == 0) throw ConfigError("k_negatives must be at least 1");
  if (negatives_per_positive == 0) throw ConfigError("negatives_per_positive must be at least 1");
}

namespace {

OfferPair make_pair(const Offer& a, const Offer& b, int label) {
  const bool a_first = a.id < b.id;
  const Offer& l = a_first ? a : b;
  const Offer& r = a_first ? b : a;
  OfferPair p;
  p.pair_id = make_pair_id(l.id, r.id);
  p.id_left = l.id;
  p.id_right = r.id;
  p.title_left = l.title;
  p.title_right = r.title;
  p.ean_left = l.ean;
  p.ean_right = r.ean;
  p.category = l.category;
  p.label = label;
  return p;
}

}  // namespace

std::vector<OfferPair> build_positive_pairs(const OfferTable& table) {
  std::map<std::string_view, std::vector<const Offer*>> groups;
  for (const auto& o : table.offers) groups[o.ean].push_back(&o);

  std::vector<OfferPair> out;
  for (auto& [ean, members] : groups) {
    std::sort(members.begin(), members.end(), [](const Offer* a, const Offer* b) { return a->id < b->id; });
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) out.push_back(make_pair(*members[i], *members[j], 1));
  }
  return out;
}

std::vector<OfferPair> mine_negative_pairs(const OfferTable& table, std::size_t k, unsigned threads) {
  if (k == 0) return {};
  const auto& offers = table.offers;
  const std::size_t n = offers.size();

  // titles as sorted token-id vectors
  std::unordered_map<std::string, unsigned> vocab;
  std::vector<std::vector<unsigned>> tokens(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto set = tokenize(normalize_title(offers[i].title));
    for (const auto& t : set.tokens()) {
      const auto [it, _] = vocab.try_emplace(t, static_cast<unsigned>(vocab.size()));
      tokens[i].push_back(it->second);
    }
    std::sort(tokens[i].begin(), tokens[i].end());
  }

  std::unordered_map<std::string_view, std::vector<std::size_t>> by_category;
  for (std::size_t i = 0; i < n; ++i) by_category[offers[i].category].push_back(i);

  // partner lists per offer, written by disjoint index ranges
  std::vector<std::vector<std::size_t>> partners(n);
  auto mine_range = [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = begin; i < end; ++i) {
      scored.clear();
      for (const std::size_t j : by_category.find(offers[i].category)->second) {
        if (j == i || offers[j].ean == offers[i].ean) continue;
        scored.emplace_back(jaccard_sorted(tokens[i], tokens[j]), j);
      }
      const auto better = [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return offers[a.second].id < offers[b.second].id;
      };
      const std::size_t keep = std::min(k, scored.size());
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
      for (std::size_t r = 0; r < keep; ++r) partners[i].push_back(scored[r].second);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));
  if (threads <= 1) {
    mine_range(0, n);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t b = 0; b < n; b += chunk) workers.emplace_back(mine_range, b, std::min(n, b + chunk));
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (const std::size_t j : partners[i]) {
      if (offers[i].id < offers[j].id)
        edges.emplace_back(i, j);
      else
        edges.emplace_back(j, i);
    }
  }
  std::sort(edges.begin(), edges.end(), [&](const auto& a, const auto& b) {
    if (offers[a.first].id != offers[b.first].id) return offers[a.first].id < offers[b.first].id;
    return offers[a.second].id < offers[b.second].id;
  });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<OfferPair> out;
  out.reserve(edges.size());
  for (const auto& [l, r] : edges) out.push_back(make_pair(offers[l], offers[r], 0));
  return out;
}

std::map<Split, PairDataset> build_splits(std::vector<OfferPair> positives, std::vector<OfferPair> negatives,
                                          const SplitPlan& plan, const std::string& name) {
  plan.validate();
  const auto& r = plan.ratios;
  const std::size_t npp = plan.negatives_per_positive;

  std::size_t unit = plan.unit_positives;
  if (unit == 0) {
    const std::size_t pos_room = positives.size() > plan.test_positives ? positives.size() - plan.test_positives : 0;
    const std::size_t neg_room = negatives.size() > plan.test_negatives ? negatives.size() - plan.test_negatives : 0;
    unit = std::min(pos_room / r.large, neg_room / (npp * r.large));
    if (unit == 0) unit = 1;  // report the smallest feasible requirement below
  }
  const std::size_t need_pos = plan.test_positives + r.large * unit;
  const std::size_t need_neg = plan.test_negatives + npp * r.large * unit;
  if (positives.size() < need_pos) throw InsufficientPoolError("positive", need_pos, positives.size());
  if (negatives.size() < need_neg) throw InsufficientPoolError("negative", need_neg, negatives.size());

  SeededRng rng(plan.seed);
  rng.shuffle(std::span<OfferPair>(positives));
  rng.shuffle(std::span<OfferPair>(negatives));

  auto take = [&](Split split, std::size_t pos_begin, std::size_t pos_count, std::size_t neg_begin,
                  std::size_t neg_count) {
    PairDataset ds;
    ds.name = name.empty() ? std::string(to_string(split)) : name + "_" + std::string(to_string(split));
    ds.split = split;
    ds.pairs.reserve(pos_count + neg_count);
    const auto pb = positives.begin() + static_cast<std::ptrdiff_t>(pos_begin);
    const auto nb = negatives.begin() + static_cast<std::ptrdiff_t>(neg_begin);
    ds.pairs.insert(ds.pairs.end(), pb, pb + static_cast<std::ptrdiff_t>(pos_count));
    ds.pairs.insert(ds.pairs.end(), nb, nb + static_cast<std::ptrdiff_t>(neg_count));
    return ds;
  };

  const std::size_t tp = plan.test_positives;
  const std::size_t tn = plan.test_negatives;
  std::map<Split, PairDataset> out;
  out.emplace(Split::test, take(Split::test, 0, tp, 0, tn));
  // train splits are prefixes of the post-test pools, hence nested
  out.emplace(Split::train_small, take(Split::train_small, tp, r.small * unit, tn, npp * r.small * unit));
  out.emplace(Split::train_medium, take(Split::train_medium, tp, r.medium * unit, tn, npp * r.medium * unit));
  out.emplace(Split::train_large, take(Split::train_large, tp, r.large * unit, tn, npp * r.large * unit));
  return out;
}

std::string to_wdc_jsonl(const PairDataset& dataset) {
  using nlohmann::ordered_json;
  std::string out;
  for (const auto& p : dataset.pairs) {
    ordered_json obj;
    obj["pair_id"] = p.pair_id;
    obj["label"] = p.label;
    obj["id_left"] = p.id_left;
    obj["title_left"] = p.title_left;
    obj["category_left"] = p.category;
    if (!p.ean_left.empty()) obj["ean_left"] = p.ean_left;
    obj["id_right"] = p.id_right;
    obj["title_right"] = p.title_right;
    if (const auto it = p.attributes.find("category_right"); it != p.attributes.end())
      obj["category_right"] = ordered_json::parse(it->second);
    else
      obj["category_right"] = p.category;
    if (!p.ean_right.empty()) obj["ean_right"] = p.ean_right;
    for (const auto& [key, value] : p.attributes) {
      if (key != "category_right") obj[key] = ordered_json::parse(value);
    }
    out += obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void emit_wdc(const PairDataset& dataset, const std::filesystem::path& path) {
  io::write_file(path, io::gzip(to_wdc_jsonl(dataset)));
}

}  // namespace pm
