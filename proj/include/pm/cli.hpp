#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pm/errors.hpp"
#include "pm/evaluation.hpp"
#include "pm/ingest.hpp"
#include "pm/matchers.hpp"
#include "pm/pair_builder.hpp"

namespace pm::cli {

/// Process exit codes. Each pipeline stage fails with its own code.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kIngest = 3,
  kPairing = 4,
  kEmit = 5,
  kBaseline = 6,
  kEvaluate = 7,
  kExport = 8,
};

/// Error raised by a command, tagged with the failing stage.
class StageError : public Error {
 public:
  StageError(std::string stage, ExitCode code, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)), code_(code) {}

  const std::string& stage() const noexcept { return stage_; }
  ExitCode code() const noexcept { return code_; }

 private:
  std::string stage_;
  ExitCode code_;
};

struct MatcherSettings {
  Scorer scorer = Scorer::tfidf_cosine;
  std::optional<double> threshold;  // tuned on the training split when unset
};

struct PipelineConfig {
  std::filesystem::path input;
  IngestSchema schema;
  CleaningRules cleaning;
  std::vector<std::string> categories;  // build order; empty = every category found
  SplitPlan plan;
  MatcherSettings matcher;
  std::filesystem::path out_dir = "out";
  double conf = 0.95;
  bool normalized_output = false;
  /// Name of the concatenated cross-category splits; empty disables them.
  std::string combined_name = "all";
  unsigned threads = 0;

  /// Throws ConfigError when a referenced path is missing or a value is out of range.
  void validate() const;
};

/// Parses the JSON config; relative paths resolve against `base_dir`.
PipelineConfig config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

struct SplitSizes {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct CategoryBuild {
  std::string category;
  std::size_t positive_pool = 0;
  std::size_t negative_pool = 0;
  std::size_t unit_positives = 0;
  std::map<Split, SplitSizes> sizes;
  std::map<Split, std::filesystem::path> files;
  /// Published reference sizes for this category, when known.
  std::optional<std::map<Split, SplitSizes>> reference;
};

struct BuildResult {
  CleaningReport cleaning;
  std::vector<CategoryBuild> categories;
  std::filesystem::path report_path;
};

/// Published sizes of the Polish train splits (household chemistry, drinks,
/// and their union), keyed by the category names used in the dump.
std::optional<std::map<Split, SplitSizes>> reference_split_sizes(std::string_view category);

/// ingest → clean → positive pairs → negative mining → splits → emit.
/// Writes `<category>_<split>.json.gz` files and build_report.json into
/// config.out_dir. Throws StageError.
BuildResult run_build(const PipelineConfig& config, std::ostream& log);

std::string cleaning_report_json(const CleaningReport& report);
std::string build_report_json(const BuildResult& result);

struct BaselineResult {
  Scorer scorer = Scorer::tfidf_cosine;
  double threshold = 0.0;
  bool threshold_tuned = false;
  std::size_t idf_documents = 0;
  std::vector<MatchPrediction> predictions;
  ConfusionCounts counts;
  Metrics metrics;
};

/// Fits the matcher on `train` (idf over its titles, one document per offer
/// id), tunes the threshold there unless fixed, and scores `test`.
BaselineResult run_baseline(const PairDataset& train, const PairDataset& test, const MatcherSettings& settings);

std::string predictions_jsonl(const std::vector<MatchPrediction>& predictions);
/// Throws ParseError (one-based line) on a malformed line.
std::vector<MatchPrediction> load_predictions(std::string_view text);

std::string baseline_report_json(const BaselineResult& result, const std::string& train_name,
                                 const std::string& test_name);

/// Labels (pair_id, label) of a pair dataset.
std::vector<LabeledPair> labels_of(const PairDataset& dataset);

/// Per-run metrics and their aggregate. Throws StageError for < 2 runs.
EvalAggregate run_evaluate(const std::vector<std::vector<MatchPrediction>>& runs,
                           const std::vector<LabeledPair>& labels, double conf);

/// JSON report; metrics in percentage points.
std::string evaluation_report_json(const EvalAggregate& agg);
/// Plain-text table in "value(± err)" form.
std::string evaluation_report_text(const EvalAggregate& agg);

/// Runs the named subcommand with argv-style arguments (argv[0] is the
/// program name). Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pm::cli
