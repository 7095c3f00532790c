#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pm/pairs.hpp"

namespace pm {

inline constexpr std::string_view kClsMarker = "[CLS]";
inline constexpr std::string_view kSepMarker = "[SEP]";
inline constexpr double kValidationFraction = 0.20;

/// "[CLS] {left title} [SEP] {right title} [SEP]"
struct SerializedPair {
  std::string pair_id;
  std::string text;
  int label = 0;

  friend bool operator==(const SerializedPair&, const SerializedPair&) = default;
};

/// Throws Error naming the side when a title is empty or already contains a
/// marker string.
SerializedPair serialize_pair(const OfferPair& pair);

struct SplitManifest {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  double val_fraction = kValidationFraction;
  std::uint64_t seed = 42;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

/// Seeded uniform shuffle; the first total - round(0.2 × total) pairs go to
/// training, the rest to validation. Unstratified. Throws Error for fewer
/// than five pairs or duplicate pair ids.
SplitManifest make_train_val_split(const PairDataset& dataset, std::uint64_t seed = 42);

/// Writes train.jsonl and val.jsonl ({pair_id, text, label} per line) plus
/// manifest.json into `out_dir`.
void export_for_training(const PairDataset& dataset, const SplitManifest& manifest,
                         const std::filesystem::path& out_dir);

}  // namespace pm
