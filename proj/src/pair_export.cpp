#include "pm/pair_export.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "pm/errors.hpp"
#include "pm/io.hpp"
#include "pm/random.hpp"

namespace pm {

namespace {

void check_title(std::string_view title, std::string_view side, const std::string& pair_id) {
  if (title.empty()) throw Error("pair '" + pair_id + "': empty " + std::string(side) + " title");
  if (title.find(kClsMarker) != std::string_view::npos || title.find(kSepMarker) != std::string_view::npos)
    throw Error("pair '" + pair_id + "': " + std::string(side) + " title contains a reserved marker");
}

}  // namespace

SerializedPair serialize_pair(const OfferPair& pair) {
  check_title(pair.title_left, "left", pair.pair_id);
  check_title(pair.title_right, "right", pair.pair_id);
  SerializedPair out;
  out.pair_id = pair.pair_id;
  out.label = pair.label;
  out.text.reserve(pair.title_left.size() + pair.title_right.size() + 20);
  out.text.append(kClsMarker).append(" ").append(pair.title_left);
  out.text.append(" ").append(kSepMarker).append(" ").append(pair.title_right);
  out.text.append(" ").append(kSepMarker);
  return out;
}

SplitManifest make_train_val_split(const PairDataset& dataset, std::uint64_t seed) {
  const std::size_t total = dataset.pairs.size();
  if (total < 5) throw Error("dataset '" + dataset.name + "' has " + std::to_string(total) +
                             " pairs; a train/validation split needs at least 5");
  std::unordered_set<std::string_view> ids;
  for (const auto& p : dataset.pairs)
    if (!ids.insert(p.pair_id).second) throw Error("duplicate pair_id '" + p.pair_id + "'");

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const auto val_count = static_cast<std::size_t>(std::llround(kValidationFraction * static_cast<double>(total)));
  const std::size_t train_count = total - val_count;

  SplitManifest m;
  m.seed = seed;
  m.val_fraction = kValidationFraction;
  for (std::size_t i = 0; i < total; ++i)
    (i < train_count ? m.train_ids : m.val_ids).push_back(dataset.pairs[order[i]].pair_id);
  return m;
}

void export_for_training(const PairDataset& dataset, const SplitManifest& manifest,
                         const std::filesystem::path& out_dir) {
  std::unordered_map<std::string_view, const OfferPair*> by_id;
  for (const auto& p : dataset.pairs) by_id.emplace(p.pair_id, &p);
  if (manifest.train_ids.size() + manifest.val_ids.size() != dataset.pairs.size())
    throw Error("manifest does not cover dataset '" + dataset.name + "'");
  if (manifest.val_ids.empty()) throw Error("manifest has an empty validation split");

  auto render = [&](const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw Error("manifest pair_id '" + id + "' not in dataset");
      const auto s = serialize_pair(*it->second);
      nlohmann::ordered_json line;
      line["pair_id"] = s.pair_id;
      line["text"] = s.text;
      line["label"] = s.label;
      out += line.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
      out += '\n';
    }
    return out;
  };

  const std::string train = render(manifest.train_ids);
  const std::string val = render(manifest.val_ids);

  nlohmann::ordered_json meta;
  meta["dataset"] = dataset.name;
  meta["seed"] = manifest.seed;
  meta["val_fraction"] = manifest.val_fraction;
  meta["total"] = dataset.pairs.size();
  meta["train_count"] = manifest.train_ids.size();
  meta["val_count"] = manifest.val_ids.size();
  meta["train_ids"] = manifest.train_ids;
  meta["val_ids"] = manifest.val_ids;

  io::write_file(out_dir / "train.jsonl", train);
  io::write_file(out_dir / "val.jsonl", val);
  io::write_file(out_dir / "manifest.json", meta.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n");
}

}  // namespace pm
