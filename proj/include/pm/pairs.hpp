#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pm {

/// Two offers and whether they show the same product.
struct OfferPair {
  std::string pair_id;
  std::string id_left;
  std::string id_right;
  std::string title_left;
  std::string title_right;
  std::string ean_left;
  std::string ean_right;
  std::string category;
  int label = 0;  // 1 = same product
  /// Fields not understood by the toolkit, kept as compact JSON text.
  std::map<std::string, std::string> attributes;

  friend bool operator==(const OfferPair&, const OfferPair&) = default;
};

/// `id_left#id_right`, the pair id convention of the WDC corpus.
std::string make_pair_id(std::string_view id_left, std::string_view id_right);

enum class Split { test, train_small, train_medium, train_large, unsplit };

std::string_view to_string(Split split) noexcept;
std::optional<Split> split_from_string(std::string_view name) noexcept;

struct PairDataset {
  std::string name;
  Split split = Split::unsplit;
  std::vector<OfferPair> pairs;

  std::size_t positives() const noexcept;
  std::size_t negatives() const noexcept { return pairs.size() - positives(); }

  friend bool operator==(const PairDataset&, const PairDataset&) = default;
};

}  // namespace pm
