#include "pm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "CLI11.hpp"
#include "json.hpp"
#include "pm/io.hpp"
#include "pm/pair_export.hpp"
#include "pm/textprep.hpp"

namespace pm::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// --- configuration ---------------------------------------------------------

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

CategoryMap category_map_from_json(const json& obj, const std::string& origin) {
  if (!obj.is_object()) throw ConfigError(origin + ": category map must be a JSON object");
  CategoryMap map;
  for (const auto& [from, to] : obj.items()) {
    if (!to.is_string()) throw ConfigError(origin + ": category map value for '" + from + "' is not a string");
    map.emplace(from, to.get<std::string>());
  }
  return map;
}

InputFormat parse_format(const std::string& name, char& delimiter) {
  if (name == "csv" || name == "delimited") return InputFormat::delimited;
  if (name == "tsv") {
    delimiter = '\t';
    return InputFormat::delimited;
  }
  if (name == "jsonl" || name == "ndjson") return InputFormat::jsonl;
  if (name == "json") return InputFormat::json;
  throw ConfigError("unknown input format '" + name + "'");
}

}  // namespace

PipelineConfig config_from_json(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  PipelineConfig cfg;
  cfg.input = resolve(base_dir, get_or<std::string>(doc, "input", ""));

  const auto delim = get_or<std::string>(doc, "delimiter", ",");
  if (delim.size() != 1) throw ConfigError("delimiter must be a single character");
  cfg.schema.delimiter = delim[0];
  cfg.schema.format = parse_format(get_or<std::string>(doc, "format", "csv"), cfg.schema.delimiter);

  if (const auto it = doc.find("columns"); it != doc.end()) {
    if (!it->is_object()) throw ConfigError("'columns' must be an object");
    auto& c = cfg.schema.columns;
    c.id = get_or<std::string>(*it, "id", c.id);
    c.ean = get_or<std::string>(*it, "ean", c.ean);
    c.seller = get_or<std::string>(*it, "seller", c.seller);
    c.title = get_or<std::string>(*it, "title", c.title);
    c.category = get_or<std::string>(*it, "category", c.category);
  }

  if (const auto it = doc.find("category_map"); it != doc.end() && !it->is_null()) {
    if (it->is_string()) {
      const auto path = resolve(base_dir, it->get<std::string>());
      if (!fs::exists(path)) throw ConfigError("category map not found: " + path.string());
      json map_doc;
      try {
        map_doc = json::parse(io::read_text(path));
      } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
      }
      cfg.cleaning.category_map = category_map_from_json(map_doc, path.string());
    } else {
      cfg.cleaning.category_map = category_map_from_json(*it, "category_map");
    }
  }
  cfg.categories = get_or<std::vector<std::string>>(doc, "categories", {});
  cfg.cleaning.keep_categories.insert(cfg.categories.begin(), cfg.categories.end());

  if (const auto it = doc.find("split"); it != doc.end()) {
    auto& p = cfg.plan;
    p.seed = get_or<std::uint64_t>(*it, "seed", p.seed);
    p.k_negatives = get_or<std::size_t>(*it, "k_negatives", p.k_negatives);
    p.test_positives = get_or<std::size_t>(*it, "test_positives", p.test_positives);
    p.test_negatives = get_or<std::size_t>(*it, "test_negatives", p.test_negatives);
    p.negatives_per_positive = get_or<std::size_t>(*it, "negatives_per_positive", p.negatives_per_positive);
    p.unit_positives = get_or<std::size_t>(*it, "unit_positives", p.unit_positives);
    if (const auto r = it->find("ratios"); r != it->end()) {
      p.ratios.small = get_or<std::size_t>(*r, "small", p.ratios.small);
      p.ratios.medium = get_or<std::size_t>(*r, "medium", p.ratios.medium);
      p.ratios.large = get_or<std::size_t>(*r, "large", p.ratios.large);
    }
  }

  if (const auto it = doc.find("matcher"); it != doc.end()) {
    const auto kind = get_or<std::string>(*it, "kind", "tfidf");
    const auto scorer = scorer_from_string(kind);
    if (!scorer) throw ConfigError("unknown matcher '" + kind + "'");
    cfg.matcher.scorer = *scorer;
    if (const auto t = it->find("threshold"); t != it->end() && !t->is_null())
      cfg.matcher.threshold = get_or<double>(*it, "threshold", 0.5);
  }

  cfg.out_dir = resolve(base_dir, get_or<std::string>(doc, "out", "out"));
  cfg.conf = get_or<double>(doc, "conf", cfg.conf);
  cfg.normalized_output = get_or<bool>(doc, "normalized_output", cfg.normalized_output);
  cfg.combined_name = get_or<std::string>(doc, "combined_name", cfg.combined_name);
  cfg.threads = get_or<unsigned>(doc, "threads", cfg.threads);
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config not found: " + path.string());
  return config_from_json(io::read_text(path), path.parent_path());
}

void PipelineConfig::validate() const {
  if (input.empty()) throw ConfigError("config has no 'input'");
  if (!fs::exists(input)) throw ConfigError("input not found: " + input.string());
  if (!(conf > 0.0 && conf < 1.0)) throw ConfigError("conf must be in (0, 1)");
  if (matcher.threshold && !(*matcher.threshold >= 0.0 && *matcher.threshold <= 1.0))
    throw ConfigError("matcher threshold must be in [0, 1]");
  plan.validate();
}

// --- build -----------------------------------------------------------------

namespace {

class StageTimer {
 public:
  StageTimer(std::ostream& log, std::string stage) : log_(log), stage_(std::move(stage)) {}

  void done(const std::string& fields = {}) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start_)
                        .count();
    log_ << "pmkit stage=" << stage_ << " elapsed_ms=" << ms;
    if (!fields.empty()) log_ << ' ' << fields;
    log_ << '\n';
  }

 private:
  std::ostream& log_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename Fn>
auto in_stage(const char* stage, ExitCode code, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, code, e.what());
  }
}

std::string file_stem_for(std::string_view category) {
  std::string out;
  for (const unsigned char c : category) out.push_back(std::isalnum(c) || c == '-' || c == '_' ? static_cast<char>(c) : '_');
  return out.empty() ? "uncategorized" : out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void normalize_titles(PairDataset& ds) {
  for (auto& p : ds.pairs) {
    p.title_left = normalize_title(p.title_left).text();
    p.title_right = normalize_title(p.title_right).text();
  }
}

json sizes_json(const std::map<Split, SplitSizes>& sizes) {
  json out = json::object();
  for (const auto& [split, s] : sizes) {
    out[std::string(to_string(split))] = {
        {"positive", s.positives}, {"negative", s.negatives}, {"total", s.positives + s.negatives}};
  }
  return out;
}

json cleaning_json(const CleaningReport& r) {
  return json{{"input", r.input},
              {"dropped_missing", r.dropped_missing},
              {"dropped_category", r.dropped_category},
              {"dropped_duplicate", r.dropped_duplicate},
              {"dropped_single_store", r.dropped_single_store},
              {"output", r.output}};
}

}  // namespace

std::optional<std::map<Split, SplitSizes>> reference_split_sizes(std::string_view category) {
  const auto name = lowercase(category);
  if (name == "chemia" || name == "household chemistry") {
    return std::map<Split, SplitSizes>{{Split::test, {300, 800}},
                                       {Split::train_small, {503, 1509}},
                                       {Split::train_medium, {1509, 4527}},
                                       {Split::train_large, {3521, 10563}}};
  }
  if (name == "napoje" || name == "drinks") {
    return std::map<Split, SplitSizes>{{Split::test, {300, 800}},
                                       {Split::train_small, {381, 1143}},
                                       {Split::train_medium, {1143, 3429}},
                                       {Split::train_large, {2667, 8001}}};
  }
  if (name == "all") {
    return std::map<Split, SplitSizes>{{Split::train_small, {884, 2652}},
                                       {Split::train_medium, {2652, 7956}},
                                       {Split::train_large, {6188, 18564}}};
  }
  return std::nullopt;
}

BuildResult run_build(const PipelineConfig& config, std::ostream& log) {
  in_stage("config", kConfig, [&] {
    config.validate();
    return 0;
  });

  BuildResult result;
  const auto records = in_stage("ingest", kIngest, [&] {
    StageTimer t(log, "parse");
    auto recs = parse_offers(io::read_text(config.input), config.schema);
    t.done("rows=" + std::to_string(recs.size()));
    return recs;
  });

  const auto table = in_stage("clean", kIngest, [&] {
    StageTimer t(log, "clean");
    auto out = clean_offers(records, config.cleaning, result.cleaning);
    t.done("kept=" + std::to_string(out.offers.size()));
    return out;
  });

  std::vector<std::string> categories = config.categories.empty() ? categories_of(table) : config.categories;
  std::map<Split, PairDataset> combined;

  for (const auto& category : categories) {
    CategoryBuild cb;
    cb.category = category;
    auto splits = in_stage("pairing", kPairing, [&] {
      const auto sub = filter_category(table, category);
      StageTimer tp(log, "positive_pairs");
      auto positives = build_positive_pairs(sub);
      tp.done("category=" + file_stem_for(category) + " pairs=" + std::to_string(positives.size()));

      StageTimer tn(log, "negative_mining");
      auto negatives = mine_negative_pairs(sub, config.plan.k_negatives, config.threads);
      tn.done("category=" + file_stem_for(category) + " pairs=" + std::to_string(negatives.size()));

      cb.positive_pool = positives.size();
      cb.negative_pool = negatives.size();
      StageTimer ts(log, "splits");
      auto out = build_splits(std::move(positives), std::move(negatives), config.plan, file_stem_for(category));
      ts.done("category=" + file_stem_for(category));
      return out;
    });
    cb.unit_positives = splits.at(Split::train_small).positives() / config.plan.ratios.small;

    in_stage("emit", kEmit, [&] {
      StageTimer t(log, "emit");
      for (auto& [split, ds] : splits) {
        if (config.normalized_output) normalize_titles(ds);
        cb.sizes[split] = {ds.positives(), ds.negatives()};
        const auto path = config.out_dir / (ds.name + ".json.gz");
        emit_wdc(ds, path);
        cb.files[split] = path;
        auto& all = combined[split];
        all.split = split;
        all.pairs.insert(all.pairs.end(), ds.pairs.begin(), ds.pairs.end());
      }
      t.done("category=" + file_stem_for(category));
      return 0;
    });
    cb.reference = reference_split_sizes(category);
    result.categories.push_back(std::move(cb));
  }

  if (!config.combined_name.empty() && categories.size() > 1) {
    in_stage("emit", kEmit, [&] {
      CategoryBuild cb;
      cb.category = config.combined_name;
      for (auto& [split, ds] : combined) {
        ds.name = file_stem_for(config.combined_name) + "_" + std::string(to_string(split));
        cb.sizes[split] = {ds.positives(), ds.negatives()};
        const auto path = config.out_dir / (ds.name + ".json.gz");
        emit_wdc(ds, path);
        cb.files[split] = path;
      }
      for (const auto& c : result.categories) {
        cb.positive_pool += c.positive_pool;
        cb.negative_pool += c.negative_pool;
        cb.unit_positives += c.unit_positives;
      }
      cb.reference = reference_split_sizes(config.combined_name);
      result.categories.push_back(std::move(cb));
      return 0;
    });
  }

  in_stage("emit", kEmit, [&] {
    result.report_path = config.out_dir / "build_report.json";
    io::write_file(result.report_path, build_report_json(result));
    return 0;
  });
  return result;
}

std::string cleaning_report_json(const CleaningReport& report) { return cleaning_json(report).dump(2) + "\n"; }

std::string build_report_json(const BuildResult& result) {
  json doc;
  doc["cleaning"] = cleaning_json(result.cleaning);
  json cats = json::array();
  for (const auto& c : result.categories) {
    json entry;
    entry["category"] = c.category;
    entry["positive_pool"] = c.positive_pool;
    entry["negative_pool"] = c.negative_pool;
    entry["unit_positives"] = c.unit_positives;
    entry["splits"] = sizes_json(c.sizes);
    if (c.reference) entry["reference"] = sizes_json(*c.reference);
    json files = json::object();
    for (const auto& [split, path] : c.files) files[std::string(to_string(split))] = path.filename().string();
    entry["files"] = files;
    cats.push_back(std::move(entry));
  }
  doc["categories"] = cats;
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

// --- baseline --------------------------------------------------------------

BaselineResult run_baseline(const PairDataset& train, const PairDataset& test, const MatcherSettings& settings) {
  if (train.pairs.empty()) throw Error("training split '" + train.name + "' is empty");
  BaselineResult out;
  out.scorer = settings.scorer;

  ThresholdMatcher matcher;
  matcher.scorer = settings.scorer;
  if (settings.scorer == Scorer::tfidf_cosine) {
    // one document per distinct offer, keyed by id (title when ids are absent)
    std::vector<NormalizedTitle> corpus;
    std::unordered_set<std::string> seen;
    auto add = [&](const std::string& id, const std::string& title) {
      if (seen.insert(id.empty() ? "\x1ftitle:" + title : id).second) corpus.push_back(normalize_title(title));
    };
    for (const auto& p : train.pairs) {
      add(p.id_left, p.title_left);
      add(p.id_right, p.title_right);
    }
    matcher.model = fit_tfidf(corpus);
    out.idf_documents = corpus.size();
  }

  if (settings.threshold) {
    matcher.threshold = *settings.threshold;
  } else {
    std::vector<ScoredLabel> scored;
    scored.reserve(train.pairs.size());
    matcher.threshold = 0.0;
    for (const auto& p : train.pairs) scored.push_back({score_pair(matcher, p).score, p.label});
    matcher.threshold = tune_threshold(scored);
    out.threshold_tuned = true;
  }
  out.threshold = matcher.threshold;

  out.predictions.reserve(test.pairs.size());
  for (const auto& p : test.pairs) out.predictions.push_back(score_pair(matcher, p));
  const auto labels = labels_of(test);
  out.counts = confusion(out.predictions, labels);
  out.metrics = metrics_from_counts(out.counts);
  return out;
}

std::string predictions_jsonl(const std::vector<MatchPrediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    json line;
    line["pair_id"] = p.pair_id;
    line["score"] = p.score;
    line["decision"] = p.decision;
    out += line.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<MatchPrediction> load_predictions(std::string_view text) {
  std::vector<MatchPrediction> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, where + e.what());
    }
    if (!obj.is_object() || !obj.contains("pair_id") || !obj.contains("decision"))
      throw ParseError(line_no, where + "prediction needs pair_id and decision");
    MatchPrediction p;
    const auto& id = obj["pair_id"];
    p.pair_id = id.is_string() ? id.get<std::string>() : id.dump();
    const auto& d = obj["decision"];
    if (d.is_boolean()) {
      p.decision = d.get<bool>() ? 1 : 0;
    } else if (d.is_number_integer() && (d.get<long long>() == 0 || d.get<long long>() == 1)) {
      p.decision = static_cast<int>(d.get<long long>());
    } else {
      throw ParseError(line_no, where + "decision must be 0 or 1");
    }
    if (const auto s = obj.find("score"); s != obj.end() && s->is_number()) p.score = s->get<double>();
    out.push_back(std::move(p));
  }
  return out;
}

std::string baseline_report_json(const BaselineResult& r, const std::string& train_name, const std::string& test_name) {
  json doc;
  doc["matcher"] = std::string(to_string(r.scorer));
  doc["threshold"] = r.threshold;
  doc["threshold_source"] = r.threshold_tuned ? "tuned" : "fixed";
  doc["train"] = train_name;
  doc["test"] = test_name;
  if (r.scorer == Scorer::tfidf_cosine) doc["idf_documents"] = r.idf_documents;
  doc["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}};
  doc["metrics"] = {{"accuracy", 100.0 * r.metrics.accuracy},
                    {"precision", 100.0 * r.metrics.precision},
                    {"recall", 100.0 * r.metrics.recall},
                    {"f1", 100.0 * r.metrics.f1}};
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

// --- evaluate --------------------------------------------------------------

std::vector<LabeledPair> labels_of(const PairDataset& dataset) {
  std::vector<LabeledPair> out;
  out.reserve(dataset.pairs.size());
  for (const auto& p : dataset.pairs) out.push_back({p.pair_id, p.label});
  return out;
}

EvalAggregate run_evaluate(const std::vector<std::vector<MatchPrediction>>& runs,
                           const std::vector<LabeledPair>& labels, double conf) {
  return in_stage("evaluate", kEvaluate, [&] {
    if (runs.size() < 2) throw Error("aggregation needs at least 2 prediction files, got " + std::to_string(runs.size()));
    std::vector<Metrics> metrics;
    metrics.reserve(runs.size());
    for (const auto& run : runs) metrics.push_back(compute_metrics(run, labels));
    return aggregate_runs(metrics, conf);
  });
}

std::string evaluation_report_json(const EvalAggregate& agg) {
  json doc;
  json runs = json::array();
  for (const auto& m : agg.runs) {
    runs.push_back({{"accuracy", 100.0 * m.accuracy},
                    {"precision", 100.0 * m.precision},
                    {"recall", 100.0 * m.recall},
                    {"f1", 100.0 * m.f1}});
  }
  doc["runs"] = runs;
  doc["n"] = agg.n;
  doc["conf"] = agg.conf;
  doc["mean_f1"] = 100.0 * agg.mean_f1;
  doc["mean_precision"] = 100.0 * agg.mean_precision;
  doc["mean_recall"] = 100.0 * agg.mean_recall;
  doc["mean_accuracy"] = 100.0 * agg.mean_accuracy;
  doc["sigma"] = 100.0 * agg.sigma;
  doc["std_err_f1"] = 100.0 * agg.std_err_f1;
  return doc.dump(2) + "\n";
}

std::string evaluation_report_text(const EvalAggregate& agg) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "runs=" << agg.n << " conf=" << agg.conf << "\n";
  for (std::size_t i = 0; i < agg.runs.size(); ++i) {
    const auto& m = agg.runs[i];
    os << "run " << (i + 1) << "  precision " << 100.0 * m.precision << "  recall " << 100.0 * m.recall << "  f1 "
       << 100.0 * m.f1 << "\n";
  }
  os << "precision " << 100.0 * agg.mean_precision << "\n";
  os << "recall    " << 100.0 * agg.mean_recall << "\n";
  os << "f1        " << 100.0 * agg.mean_f1 << "(± " << 100.0 * agg.std_err_f1 << ")\n";
  return os.str();
}

// --- entry point -----------------------------------------------------------

namespace {

PairDataset load_pairs_file(const fs::path& path, Split split = Split::unsplit) {
  if (!fs::exists(path)) throw IoError("file not found: " + path.string());
  return load_wdc_pairs(io::read_text(path), path.filename().string(), split);
}

std::string summary_line(const CategoryBuild& c) {
  std::ostringstream os;
  os << c.category << ":";
  for (const auto& [split, s] : c.sizes) {
    os << ' ' << to_string(split) << '=' << s.positives << '/' << s.negatives;
    if (c.reference) {
      if (const auto it = c.reference->find(split); it != c.reference->end())
        os << " (reference " << it->second.positives << '/' << it->second.negatives << ')';
    }
  }
  return os.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Product-matching dataset construction, baselines and evaluation", "pmkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k_negatives;
  std::string out_opt;
  std::string report_path;
  std::optional<unsigned> threads;

  auto* build = app.add_subcommand("build", "Build WDC-format test and train splits from an offer dump");
  build->add_option("--config", config_path, "Pipeline config (JSON)")->required();
  build->add_option("--seed", seed, "Split seed");
  build->add_option("--k-negatives", k_negatives, "Hard negatives kept per offer");
  build->add_option("--out", out_opt, "Output directory");
  build->add_option("--report", report_path, "Write the cleaning report here instead of stderr");
  build->add_option("--threads", threads, "Negative-mining threads (0 = all cores)");

  std::string train_path;
  std::string test_path;
  std::string matcher_name;
  std::optional<double> threshold;
  auto* baseline = app.add_subcommand("baseline", "Score a test split with a tf-idf or Jaccard threshold matcher");
  baseline->add_option("--config", config_path, "Pipeline config (JSON); matcher section is used");
  baseline->add_option("--train", train_path, "Training pair file")->required();
  baseline->add_option("--test", test_path, "Test / gold-standard pair file")->required();
  baseline->add_option("--matcher", matcher_name, "tfidf or jaccard")->check(CLI::IsMember({"tfidf", "jaccard"}));
  baseline->add_option("--threshold", threshold, "Fixed decision threshold (default: tuned on train)")
      ->check(CLI::Range(0.0, 1.0));
  baseline->add_option("--out", out_opt, "Output directory for predictions.jsonl and baseline_report.json");
  baseline->add_option("--report", report_path, "Report path (default <out>/baseline_report.json)");

  std::vector<std::string> prediction_paths;
  std::string labels_path;
  std::optional<double> conf;
  auto* evaluate = app.add_subcommand("evaluate", "Aggregate metrics over repeated runs");
  evaluate->add_option("--config", config_path, "Pipeline config (JSON); conf is used");
  evaluate->add_option("--predictions", prediction_paths, "Prediction files, one per run")->required();
  evaluate->add_option("--labels", labels_path, "Pair file holding the true labels")->required();
  evaluate->add_option("--conf", conf, "Confidence level")->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--out", out_opt, "Write the JSON report here");

  std::string dataset_path;
  auto* exporter = app.add_subcommand("export", "Write train/validation files for transformer fine-tuning");
  exporter->add_option("--config", config_path, "Pipeline config (JSON); split seed is used");
  exporter->add_option("--dataset", dataset_path, "Pair file to export")->required();
  exporter->add_option("--seed", seed, "Shuffle seed (default 42)");
  exporter->add_option("--out", out_opt, "Output directory")->required();

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    std::optional<PipelineConfig> cfg;
    if (!config_path.empty()) {
      cfg = in_stage("config", kConfig, [&] { return load_config(config_path); });
    }

    if (build->parsed()) {
      if (seed) cfg->plan.seed = *seed;
      if (k_negatives) cfg->plan.k_negatives = *k_negatives;
      if (!out_opt.empty()) cfg->out_dir = out_opt;
      if (threads) cfg->threads = *threads;
      const auto result = run_build(*cfg, err);
      if (report_path.empty()) {
        err << cleaning_report_json(result.cleaning);
      } else {
        in_stage("emit", kEmit, [&] {
          io::write_file(report_path, cleaning_report_json(result.cleaning));
          return 0;
        });
      }
      for (const auto& c : result.categories) out << summary_line(c) << '\n';
      out << "report: " << result.report_path.string() << '\n';
      return kOk;
    }

    if (baseline->parsed()) {
      MatcherSettings settings = cfg ? cfg->matcher : MatcherSettings{};
      if (!matcher_name.empty()) settings.scorer = *scorer_from_string(matcher_name);
      if (threshold) settings.threshold = threshold;
      const auto result = in_stage("baseline", kBaseline, [&] {
        const auto train = load_pairs_file(train_path);
        const auto test = load_pairs_file(test_path, Split::test);
        auto r = run_baseline(train, test, settings);
        const fs::path dir = out_opt.empty() ? fs::path(".") : fs::path(out_opt);
        io::write_file(dir / "predictions.jsonl", predictions_jsonl(r.predictions));
        const fs::path rp = report_path.empty() ? dir / "baseline_report.json" : fs::path(report_path);
        io::write_file(rp, baseline_report_json(r, train.name, test.name));
        return r;
      });
      out << std::fixed << std::setprecision(2) << "matcher=" << to_string(result.scorer)
          << " threshold=" << std::setprecision(6) << result.threshold << std::setprecision(2)
          << " precision=" << 100.0 * result.metrics.precision << " recall=" << 100.0 * result.metrics.recall
          << " f1=" << 100.0 * result.metrics.f1 << '\n';
      return kOk;
    }

    if (evaluate->parsed()) {
      const double level = conf ? *conf : (cfg ? cfg->conf : 0.95);
      const auto agg = in_stage("evaluate", kEvaluate, [&] {
        const auto labels = labels_of(load_pairs_file(labels_path));
        std::vector<std::vector<MatchPrediction>> runs;
        for (const auto& p : prediction_paths) runs.push_back(load_predictions(io::read_text(p)));
        return run_evaluate(runs, labels, level);
      });
      out << evaluation_report_text(agg);
      const auto report = evaluation_report_json(agg);
      if (out_opt.empty()) {
        out << report;
      } else {
        in_stage("evaluate", kEvaluate, [&] {
          io::write_file(out_opt, report);
          return 0;
        });
      }
      return kOk;
    }

    if (exporter->parsed()) {
      const std::uint64_t s = seed ? *seed : (cfg ? cfg->plan.seed : 42);
      const auto manifest = in_stage("export", kExport, [&] {
        const auto ds = load_pairs_file(dataset_path);
        auto m = make_train_val_split(ds, s);
        export_for_training(ds, m, out_opt);
        return m;
      });
      out << "train=" << manifest.train_ids.size() << " val=" << manifest.val_ids.size() << " seed=" << s << '\n';
      return kOk;
    }
  } catch (const StageError& e) {
    err << "pmkit: " << e.what() << '\n';
    return e.code();
  }
  return kUsage;
}

}  // namespace pm::cli
