#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pm/ingest.hpp"
#include "pm/pairs.hpp"

namespace pm {

struct SplitRatios {
  std::size_t small = 1;
  std::size_t medium = 3;
  std::size_t large = 7;
};

struct SplitPlan {
  std::uint64_t seed = 42;
  std::size_t k_negatives = 20;
  SplitRatios ratios;
  std::size_t test_positives = 300;
  std::size_t test_negatives = 800;
  std::size_t negatives_per_positive = 3;
  /// Positives in one ratio unit (the small split). 0 picks the largest
  /// value both pools can support after the test split is removed.
  std::size_t unit_positives = 0;

  /// Throws ConfigError unless ratios are positive and non-decreasing.
  void validate() const;
};

/// All same-EAN pairs, label 1, oriented id_left < id_right and ordered by
/// (ean, id_left, id_right).
std::vector<OfferPair> build_positive_pairs(const OfferTable& table);

/// Hard negatives: for every offer, the `k` same-category offers with a
/// different EAN whose normalized titles have the highest token Jaccard
/// with it (ties to the smaller partner id). The union over all offers is
/// oriented, deduplicated and ordered by (id_left, id_right).
///
/// `threads` = 0 uses the hardware concurrency. The result does not depend
/// on the thread count.
std::vector<OfferPair> mine_negative_pairs(const OfferTable& table, std::size_t k,
                                           unsigned threads = 0);

/// Draws the test split (uniform, seeded) from both pools first, then nested
/// train splits small ⊂ medium ⊂ large from what remains, each holding
/// exactly `negatives_per_positive` negatives per positive.
///
/// Draw order is part of the output contract: the positive pool is shuffled
/// first, then the negative pool, both with one SeededRng(plan.seed).
/// Throws InsufficientPoolError naming the deficient class.
std::map<Split, PairDataset> build_splits(std::vector<OfferPair> positives,
                                          std::vector<OfferPair> negatives, const SplitPlan& plan,
                                          const std::string& name = {});

/// One WDC-style JSON object per line (pair_id, label, _left/_right fields,
/// then retained attributes).
std::string to_wdc_jsonl(const PairDataset& dataset);

/// Writes `to_wdc_jsonl` gzip-compressed. Output bytes depend only on the dataset.
void emit_wdc(const PairDataset& dataset, const std::filesystem::path& path);

}  // namespace pm
