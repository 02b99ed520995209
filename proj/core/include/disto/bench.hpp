#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disto/metric.hpp"
#include "disto/train.hpp"

namespace disto {

struct Rating {
  std::string instance_id;
  int distractor_index = 0;
  std::string annotator;
  double value = 0.0;  // bad 0, neutral 0.5, good 1
};

struct RatingsFile {
  std::vector<Rating> rows;

  // .csv or .jsonl, keyed on the extension
  static RatingsFile load(const std::string& path);
};

double rating_value_from_string(const std::string& s);

// Drops annotators whose exact-match accuracy on calibration items falls
// below the threshold.
struct RaterFilterOptions {
  double min_accuracy = 0.3;
  std::map<std::string, double> calibration;  // "instance_id#index" -> gold value
};
RatingsFile filter_raters(const RatingsFile& ratings, const RaterFilterOptions& options);

// Corpus-level BLEU-n: every generated distractor is a hypothesis scored
// against its instance's full gold list as multi-reference, cumulative
// uniform n-gram weights, brevity penalty, no smoothing.
double bleu_n(const std::vector<GeneratedSet>& sets, int n);

// Percentage of generated distractors exactly matching their instance's answer.
double ansdup(const std::vector<GeneratedSet>& sets);

// Percentage of unordered same-instance distractor pairs that exactly match.
double disdup(const std::vector<GeneratedSet>& sets);

// Standard Fleiss kappa. Every item must have the same rater count unless
// allow_varying_raters is set, which switches to the generalized form with
// per-item counts.
double fleiss_kappa(const RatingsFile& ratings, bool allow_varying_raters = false);

using ItemKey = std::pair<std::string, int>;  // (instance id, distractor index)

// Correlates per-distractor scores with the mean human rating per item.
PearsonResult correlate_with_ratings(const std::map<ItemKey, double>& scores,
                                     const RatingsFile& ratings);

struct ModelRow {
  std::string model;
  std::array<double, 4> bleu{};  // BLEU-1..4
  double disto = 0.0;
  double ansdup = 0.0;  // lower is better
  double disdup = 0.0;  // lower is better
  std::optional<double> external;
};

struct BenchReport {
  std::vector<ModelRow> rows;
  std::map<std::string, std::vector<std::string>> rankings;  // column -> models best-first
  bool rank_disagreement = false;  // some BLEU column orders models differently than DISTO
  std::string checkpoint_fingerprint;
  std::string external_name;

  std::string to_json() const;
  std::string render() const;
};

struct BenchOptions {
  // executable invoked as `adapter <generated.jsonl>`, printing a number or
  // {"score": x} on stdout
  std::optional<std::string> external_adapter;
  std::string external_name = "external";
};

BenchReport build_report(
    const std::vector<std::pair<std::string, std::vector<GeneratedSet>>>& models,
    const ScorerCheckpoint& checkpoint, const BenchOptions& options = {});

}  // namespace disto
