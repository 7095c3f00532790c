#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pm/pairs.hpp"

namespace pm {

/// Canonical field names a schema maps source columns onto.
namespace field {
inline constexpr std::string_view id = "id";
inline constexpr std::string_view ean = "ean";
inline constexpr std::string_view seller = "seller";
inline constexpr std::string_view title = "title";
inline constexpr std::string_view category = "category";
}  // namespace field

/// One input row before cleaning. Mapped columns are stored under their
/// canonical names, all other columns under their source names.
struct RawOfferRecord {
  std::size_t source_row = 0;
  std::map<std::string, std::string, std::less<>> fields;

  /// Empty string when the field is absent.
  std::string_view get(std::string_view name) const;

  friend bool operator==(const RawOfferRecord&, const RawOfferRecord&) = default;
};

enum class InputFormat {
  delimited,  // header row + RFC 4180 quoting
  jsonl,      // one JSON object per line
  json,       // array of objects, or a column-oriented object {col: {row: value}}
};

/// Source column names for each canonical field. `id` and `category` may be
/// left empty: ids then default to the source row index, categories to "".
struct ColumnMapping {
  std::string id;
  std::string ean = "ean";
  std::string seller = "seller";
  std::string title = "title";
  std::string category = "category";
};

struct IngestSchema {
  InputFormat format = InputFormat::delimited;
  char delimiter = ',';
  ColumnMapping columns;
};

/// Maps store-specific category names onto one unified name. Names absent
/// from the table pass through unchanged.
using CategoryMap = std::map<std::string, std::string, std::less<>>;

struct Offer {
  std::string id;
  std::string ean;
  std::string seller;
  std::string title;
  std::string category;

  friend bool operator==(const Offer&, const Offer&) = default;
};

struct OfferTable {
  std::vector<Offer> offers;
  std::optional<std::string> category_filter;

  friend bool operator==(const OfferTable&, const OfferTable&) = default;
};

struct CleaningRules {
  CategoryMap category_map;
  /// Unified category names to keep; empty keeps every category.
  std::set<std::string, std::less<>> keep_categories;
};

struct CleaningReport {
  std::size_t input = 0;
  std::size_t dropped_missing = 0;
  std::size_t dropped_category = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t dropped_single_store = 0;
  std::size_t output = 0;
};

/// Parses delimited text, JSON-lines or JSON into one record per input row,
/// in file order, without filtering. Gzip input is decompressed first.
///
/// Throws ParseError (carrying the zero-based data row index) on a
/// malformed row and ConfigError when the schema cannot be mapped onto
/// the input columns.
std::vector<RawOfferRecord> parse_offers(std::string_view input, const IngestSchema& schema);

/// Applies the cleaning rules in order:
///   1. drop records missing seller, EAN or title;
///   2. unify category names, drop categories not kept;
///   3. keep the first record per (EAN, seller) and per offer id;
///   4. drop records whose EAN is offered by fewer than two sellers.
/// Survivors keep their input order.
OfferTable clean_offers(std::span<const RawOfferRecord> records, const CleaningRules& rules,
                        CleaningReport& report);
OfferTable clean_offers(std::span<const RawOfferRecord> records, const CleaningRules& rules);

/// Converts a table back to records (ids preserved), so cleaned output can
/// be fed through `clean_offers` again.
std::vector<RawOfferRecord> to_raw_records(const OfferTable& table);

/// Restricts a table to one category.
OfferTable filter_category(const OfferTable& table, std::string_view category);

/// Distinct categories in first-appearance order.
std::vector<std::string> categories_of(const OfferTable& table);

/// Loads a WDC-style pair file (JSON-lines, optionally gzip). Requires
/// `title_left`, `title_right` and a 0/1 `label` per line; unknown fields
/// are retained as opaque attributes. ParseError carries the one-based line.
PairDataset load_wdc_pairs(std::string_view input, std::string name = {},
                           Split split = Split::unsplit);

}  // namespace pm
