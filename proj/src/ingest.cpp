#include "pm/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "pm/errors.hpp"
#include "pm/io.hpp"

namespace pm {

using ordered_json = nlohmann::ordered_json;

std::string_view RawOfferRecord::get(std::string_view name) const {
  const auto it = fields.find(name);
  return it == fields.end() ? std::string_view{} : std::string_view{it->second};
}

namespace {

std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
  return s;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// RFC 4180 reader: quoted fields may contain the delimiter, doubled quotes
// and line breaks. Returns false at end of input.
class DelimitedReader {
 public:
  DelimitedReader(std::string_view text, char delimiter) : text_(text), delim_(delimiter) {}

  bool next(std::vector<std::string>& row, std::size_t row_index) {
    row.clear();
    while (pos_ < text_.size()) {
      // skip blank lines between records
      const auto eol = text_.find('\n', pos_);
      const auto line = text_.substr(pos_, eol == std::string_view::npos ? text_.npos : eol - pos_);
      if (!line.empty() && line != "\r") break;
      pos_ = eol == std::string_view::npos ? text_.size() : eol + 1;
    }
    if (pos_ >= text_.size()) return false;

    std::string cell;
    bool quoted = false;
    bool after_quote = false;
    while (true) {
      if (pos_ >= text_.size()) {
        if (quoted) throw ParseError(row_index, "row " + std::to_string(row_index) + ": unterminated quoted field");
        row.push_back(std::move(cell));
        return true;
      }
      const char c = text_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            cell.push_back('"');
            ++pos_;
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          cell.push_back(c);
        }
        continue;
      }
      if (c == delim_) {
        row.push_back(std::move(cell));
        cell.clear();
        after_quote = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        row.push_back(std::move(cell));
        return true;
      } else if (c == '"' && cell.empty() && !after_quote) {
        quoted = true;
      } else if (after_quote) {
        throw ParseError(row_index, "row " + std::to_string(row_index) + ": text after closing quote");
      } else {
        cell.push_back(c);
      }
    }
  }

 private:
  std::string_view text_;
  char delim_;
  std::size_t pos_ = 0;
};

struct MappedColumn {
  std::string source;
  std::string_view canonical;
  bool required;
};

std::vector<MappedColumn> mapped_columns(const IngestSchema& schema) {
  const auto& c = schema.columns;
  std::vector<MappedColumn> out;
  auto add = [&](const std::string& source, std::string_view canonical, bool required) {
    if (source.empty()) {
      if (required) throw ConfigError("schema maps no source column to '" + std::string(canonical) + "'");
      return;
    }
    out.push_back({source, canonical, required});
  };
  add(c.id, field::id, false);
  add(c.ean, field::ean, true);
  add(c.seller, field::seller, true);
  add(c.title, field::title, true);
  add(c.category, field::category, false);
  return out;
}

// Builds a record from source-named cells, renaming mapped columns.
RawOfferRecord make_record(std::size_t row, std::vector<std::pair<std::string, std::string>> cells,
                           const std::vector<MappedColumn>& mapping) {
  RawOfferRecord rec;
  rec.source_row = row;
  // mapped columns first so an unmapped source column cannot shadow them;
  // one source column may feed several canonical fields
  for (const auto& m : mapping) {
    const auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& c) { return c.first == m.source; });
    if (it != cells.end()) rec.fields.insert_or_assign(std::string(m.canonical), it->second);
  }
  for (auto& [name, value] : cells) {
    const bool mapped = std::any_of(mapping.begin(), mapping.end(), [&](const auto& m) { return m.source == name; });
    if (name.empty() || mapped) continue;
    rec.fields.emplace(std::move(name), std::move(value));
  }
  return rec;
}

std::vector<RawOfferRecord> parse_delimited(std::string_view text, const IngestSchema& schema,
                                            const std::vector<MappedColumn>& mapping) {
  DelimitedReader reader(text, schema.delimiter);
  std::vector<std::string> header;
  if (!reader.next(header, 0)) return {};
  for (auto& h : header) h = std::string(trim(h));

  for (const auto& m : mapping) {
    if (std::find(header.begin(), header.end(), m.source) == header.end())
      throw ConfigError("column '" + m.source + "' (mapped to " + std::string(m.canonical) +
                        ") not found in header");
  }

  std::vector<RawOfferRecord> records;
  std::vector<std::string> row;
  for (std::size_t index = 0; reader.next(row, index); ++index) {
    if (row.size() != header.size()) {
      throw ParseError(index, "row " + std::to_string(index) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(row.size()));
    }
    std::vector<std::pair<std::string, std::string>> cells;
    cells.reserve(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) cells.emplace_back(header[i], std::move(row[i]));
    records.push_back(make_record(index, std::move(cells), mapping));
  }
  return records;
}

// Scalars become their natural text; integral floats drop the ".0" that
// pandas adds to numeric EAN columns. Null means absent.
std::optional<std::string> json_scalar_text(const ordered_json& v) {
  switch (v.type()) {
    case ordered_json::value_t::null:
      return std::nullopt;
    case ordered_json::value_t::string:
      return v.get<std::string>();
    case ordered_json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 9.007199254740992e15)
        return std::to_string(static_cast<long long>(d));
      return v.dump();
    }
    default:
      return v.dump();
  }
}

RawOfferRecord record_from_object(std::size_t row, const ordered_json& obj,
                                  const std::vector<MappedColumn>& mapping) {
  if (!obj.is_object()) throw ParseError(row, "row " + std::to_string(row) + ": not a JSON object");
  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto& [key, value] : obj.items()) {
    if (auto text = json_scalar_text(value)) cells.emplace_back(key, std::move(*text));
  }
  return make_record(row, std::move(cells), mapping);
}

void require_mapped_somewhere(const std::vector<RawOfferRecord>& records,
                              const std::vector<MappedColumn>& mapping) {
  if (records.empty()) return;
  for (const auto& m : mapping) {
    if (!m.required) continue;
    const bool seen = std::any_of(records.begin(), records.end(),
                                  [&](const RawOfferRecord& r) { return r.fields.contains(m.canonical); });
    if (!seen)
      throw ConfigError("column '" + m.source + "' (mapped to " + std::string(m.canonical) +
                        ") not present in any input row");
  }
}

std::vector<RawOfferRecord> parse_jsonl(std::string_view text, const std::vector<MappedColumn>& mapping) {
  std::vector<RawOfferRecord> records;
  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (is_blank(line)) continue;
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw ParseError(index, "row " + std::to_string(index) + ": " + e.what());
    }
    records.push_back(record_from_object(index, obj, mapping));
    ++index;
  }
  require_mapped_somewhere(records, mapping);
  return records;
}

std::vector<RawOfferRecord> parse_json_document(std::string_view text,
                                                const std::vector<MappedColumn>& mapping) {
  if (is_blank(text)) return {};
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(0, std::string("invalid JSON document: ") + e.what());
  }
  std::vector<RawOfferRecord> records;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) records.push_back(record_from_object(i, doc[i], mapping));
  } else if (doc.is_object()) {
    // column-oriented: {column: {row_key: value}}; row order follows the first column
    std::vector<std::string> row_keys;
    for (const auto& [column, cells] : doc.items()) {
      if (!cells.is_object()) throw ParseError(0, "column '" + column + "' is not an object of rows");
      if (row_keys.empty())
        for (const auto& [key, _] : cells.items()) row_keys.push_back(key);
    }
    for (std::size_t i = 0; i < row_keys.size(); ++i) {
      ordered_json obj = ordered_json::object();
      for (const auto& [column, cells] : doc.items()) {
        if (const auto it = cells.find(row_keys[i]); it != cells.end()) obj[column] = *it;
      }
      records.push_back(record_from_object(i, obj, mapping));
    }
  } else {
    throw ParseError(0, "JSON input must be an array or a column-oriented object");
  }
  require_mapped_somewhere(records, mapping);
  return records;
}

}  // namespace

std::vector<RawOfferRecord> parse_offers(std::string_view input, const IngestSchema& schema) {
  const auto mapping = mapped_columns(schema);
  std::string decompressed;
  if (io::is_gzip(input)) {
    decompressed = io::gunzip(input);
    input = decompressed;
  }
  input = strip_bom(input);
  switch (schema.format) {
    case InputFormat::delimited:
      return parse_delimited(input, schema, mapping);
    case InputFormat::jsonl:
      return parse_jsonl(input, mapping);
    case InputFormat::json:
      return parse_json_document(input, mapping);
  }
  throw ConfigError("unknown input format");
}

namespace {

std::string offer_id(const RawOfferRecord& rec) {
  const auto id = trim(rec.get(field::id));
  return id.empty() ? std::to_string(rec.source_row) : std::string(id);
}

}  // namespace

OfferTable clean_offers(std::span<const RawOfferRecord> records, const CleaningRules& rules,
                        CleaningReport& report) {
  report = CleaningReport{};
  report.input = records.size();

  std::vector<Offer> kept;
  kept.reserve(records.size());
  std::unordered_set<std::string> seen_ean_seller;
  std::unordered_set<std::string> seen_ids;

  for (const auto& rec : records) {
    const auto ean = trim(rec.get(field::ean));
    const auto seller = trim(rec.get(field::seller));
    const auto title = rec.get(field::title);
    if (ean.empty() || seller.empty() || trim(title).empty()) {
      ++report.dropped_missing;
      continue;
    }

    std::string category(trim(rec.get(field::category)));
    if (const auto it = rules.category_map.find(category); it != rules.category_map.end())
      category = it->second;
    if (!rules.keep_categories.empty() && !rules.keep_categories.contains(category)) {
      ++report.dropped_category;
      continue;
    }

    std::string key;
    key.reserve(ean.size() + seller.size() + 1);
    key.append(ean).push_back('\x1f');
    key.append(seller);
    std::string id = offer_id(rec);
    if (seen_ean_seller.contains(key) || seen_ids.contains(id)) {
      ++report.dropped_duplicate;
      continue;
    }
    seen_ean_seller.insert(std::move(key));
    seen_ids.insert(id);
    kept.push_back(Offer{std::move(id), std::string(ean), std::string(seller), std::string(title),
                         std::move(category)});
  }

  // after dedupe every surviving record of an EAN has a distinct seller
  std::unordered_map<std::string, std::size_t> sellers_per_ean;
  for (const auto& o : kept) ++sellers_per_ean[o.ean];

  OfferTable table;
  for (auto& o : kept) {
    if (sellers_per_ean[o.ean] < 2) {
      ++report.dropped_single_store;
      continue;
    }
    table.offers.push_back(std::move(o));
  }
  if (rules.keep_categories.size() == 1) table.category_filter = *rules.keep_categories.begin();
  report.output = table.offers.size();
  return table;
}

OfferTable clean_offers(std::span<const RawOfferRecord> records, const CleaningRules& rules) {
  CleaningReport ignored;
  return clean_offers(records, rules, ignored);
}

std::vector<RawOfferRecord> to_raw_records(const OfferTable& table) {
  std::vector<RawOfferRecord> out;
  out.reserve(table.offers.size());
  for (std::size_t i = 0; i < table.offers.size(); ++i) {
    const auto& o = table.offers[i];
    RawOfferRecord rec;
    rec.source_row = i;
    rec.fields.emplace(field::id, o.id);
    rec.fields.emplace(field::ean, o.ean);
    rec.fields.emplace(field::seller, o.seller);
    rec.fields.emplace(field::title, o.title);
    rec.fields.emplace(field::category, o.category);
    out.push_back(std::move(rec));
  }
  return out;
}

OfferTable filter_category(const OfferTable& table, std::string_view category) {
  OfferTable out;
  out.category_filter = std::string(category);
  std::copy_if(table.offers.begin(), table.offers.end(), std::back_inserter(out.offers),
               [&](const Offer& o) { return o.category == category; });
  return out;
}

std::vector<std::string> categories_of(const OfferTable& table) {
  std::vector<std::string> out;
  std::unordered_set<std::string_view> seen;
  for (const auto& o : table.offers)
    if (seen.insert(o.category).second) out.push_back(o.category);
  return out;
}

// --- WDC pair files --------------------------------------------------------

namespace {

constexpr std::string_view kKnownPairFields[] = {
    "pair_id",    "label",          "id_left",  "id_right",  "title_left",
    "title_right", "category_left", "category_right", "ean_left", "ean_right",
};

bool is_known_pair_field(std::string_view key) {
  return std::find(std::begin(kKnownPairFields), std::end(kKnownPairFields), key) !=
         std::end(kKnownPairFields);
}

int parse_label(const ordered_json& v, std::size_t line) {
  auto bad = [&]() -> int {
    throw ParseError(line, "line " + std::to_string(line) + ": non-binary label " + v.dump());
  };
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto n = v.get<long long>();
    return (n == 0 || n == 1) ? static_cast<int>(n) : bad();
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    return (d == 0.0 || d == 1.0) ? static_cast<int>(d) : bad();
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "0") return 0;
    if (s == "1") return 1;
  }
  return bad();
}

std::string text_field(const ordered_json& obj, std::string_view key) {
  const auto it = obj.find(key);
  if (it == obj.end()) return {};
  return json_scalar_text(*it).value_or(std::string{});
}

}  // namespace

PairDataset load_wdc_pairs(std::string_view input, std::string name, Split split) {
  std::string decompressed;
  if (io::is_gzip(input)) {
    decompressed = io::gunzip(input);
    input = decompressed;
  }
  input = strip_bom(input);

  PairDataset ds;
  ds.name = std::move(name);
  ds.split = split;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    auto eol = input.find('\n', pos);
    if (eol == std::string_view::npos) eol = input.size();
    const auto line = input.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (is_blank(line)) continue;

    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw ParseError(line_no, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "line " + std::to_string(line_no) + ": not a JSON object");

    for (const auto key : {"title_left", "title_right", "label"}) {
      const auto it = obj.find(key);
      if (it == obj.end() || it->is_null())
        throw ParseError(line_no, "line " + std::to_string(line_no) + ": missing required field '" + key + "'");
    }

    OfferPair pair;
    pair.label = parse_label(obj["label"], line_no);
    pair.id_left = text_field(obj, "id_left");
    pair.id_right = text_field(obj, "id_right");
    pair.title_left = text_field(obj, "title_left");
    pair.title_right = text_field(obj, "title_right");
    pair.ean_left = text_field(obj, "ean_left");
    pair.ean_right = text_field(obj, "ean_right");
    pair.category = text_field(obj, "category_left");
    pair.pair_id = text_field(obj, "pair_id");
    if (pair.pair_id.empty()) pair.pair_id = make_pair_id(pair.id_left, pair.id_right);

    if (const auto it = obj.find("category_right"); it != obj.end()) {
      if (json_scalar_text(*it).value_or(std::string{}) != pair.category)
        pair.attributes.emplace("category_right", it->dump());
    }
    for (const auto& [key, value] : obj.items()) {
      if (!is_known_pair_field(key)) pair.attributes.emplace(key, value.dump());
    }
    ds.pairs.push_back(std::move(pair));
  }
  return ds;
}

}  // namespace pm
