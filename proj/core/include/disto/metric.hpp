#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "disto/scorer.hpp"

namespace disto {

// One instance's worth of distractors produced by a generation model.
struct GeneratedSet {
  std::string id;
  std::string question;
  std::string answer;
  std::string article;
  std::vector<std::string> generated;
  std::optional<std::vector<std::string>> gold;  // needed only by surface metrics
};

std::vector<GeneratedSet> read_generated_jsonl(const std::string& path);
void write_generated_jsonl(const std::string& path, const std::vector<GeneratedSet>& sets);

struct InstanceScore {
  std::string id;
  std::vector<double> per_distractor;
  double mean = 0.0;
};

struct ScoreReport {
  std::vector<InstanceScore> instances;
  double aggregate = 0.0;  // 100 x mean of per-instance means
  std::string checkpoint_fingerprint;

  std::string to_json() const;
};

double score_distractor(const std::string& question, const std::string& answer,
                        const std::string& distractor, const std::string& article,
                        const ScorerCheckpoint& checkpoint);

double score_instance(const GeneratedSet& set, const ScorerCheckpoint& checkpoint);

ScoreReport score_corpus(const std::vector<GeneratedSet>& sets,
                         const ScorerCheckpoint& checkpoint);

}  // namespace disto
