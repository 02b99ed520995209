#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace disto {

enum class Split { train, validation, test };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

enum class Provenance { gold, ans_replication, random_pool, cluster_farthest, mask_fill };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// One article/question/answer/distractor-set record from a source corpus.
struct MCQInstance {
  std::string id;
  std::string dataset;
  Split split = Split::train;
  std::string article;
  std::string question;
  std::string answer;
  std::vector<std::string> distractors;
};

// A single (question, answer, one distractor, article) training row.
struct FlatInstance {
  std::string id;
  std::string parent_id;
  std::string article;
  std::string question;
  std::string answer;
  std::string distractor;
  double target = 1.0;
  Provenance provenance = Provenance::gold;
  // Set when an augmentation technique could not apply and another one
  // produced the row in its place ("random_pool" etc.). The provenance
  // field keeps the slot the row fills so per-technique quotas stay exact.
  std::optional<std::string> fallback;
};

struct SplitCounts {
  std::size_t instances = 0;
  std::size_t flattened = 0;
  std::size_t augmented = 0;
};

struct CorpusStats {
  std::map<Split, SplitCounts> per_split;
  SplitCounts total() const;
};

struct RecordError {
  std::size_t record = 0;  // 1-based line / record number
  std::string message;
};

struct LoadResult {
  std::vector<MCQInstance> instances;
  std::vector<RecordError> errors;
};

// Dataset adapters translate heterogeneous source formats into
// MCQInstance. Per-record parse failures are reported in LoadResult;
// an unreadable path or unknown adapter throws.
using AdapterFn = std::function<LoadResult(const std::string& path)>;

void register_adapter(const std::string& name, AdapterFn fn);
std::vector<std::string> registered_adapters();

LoadResult load_dataset(const std::string& path, const std::string& adapter);

struct DropRecord {
  std::string id;
  std::string reason;
};

struct PreprocessResult {
  std::vector<MCQInstance> kept;
  std::vector<DropRecord> dropped;
};

struct PreprocessOptions {
  double punct_corruption_threshold = 0.9;
  std::vector<std::string> rejected_answer_phrases = {"none of the above"};
  std::size_t max_distractors = 3;
};

// Drops corrupted / "none of the above" / distractor-less / redundant
// instances; truncates distractor lists to max_distractors. Total: never
// throws, every drop carries a machine-readable reason.
PreprocessResult preprocess(const std::vector<MCQInstance>& instances,
                            const PreprocessOptions& opts = {});

// Deterministic holdout split. Validation size = round(fraction * n).
std::pair<std::vector<MCQInstance>, std::vector<MCQInstance>> split_holdout(
    const std::vector<MCQInstance>& instances, double fraction, std::uint64_t seed);

// Replicates each instance into one FlatInstance per distractor, all
// gold with target 1.0.
std::vector<FlatInstance> flatten(const std::vector<MCQInstance>& instances);

CorpusStats stats(const std::vector<MCQInstance>& instances,
                  const std::vector<FlatInstance>& flats,
                  const std::vector<FlatInstance>& augmented);

// --- normalized JSONL schema ---
// {"id","dataset","split","article","question","answer","distractors":[...]}

void write_mcq_jsonl(const std::string& path, const std::vector<MCQInstance>& instances);
void write_drop_report(const std::string& path, const std::vector<DropRecord>& drops);

// Flat rows as JSONL. An optional first line {"_meta": {...}} carries the
// seed and provider identities; readers skip it transparently.
struct FlatFileMeta {
  std::map<std::string, std::string> fields;
};

void write_flat_jsonl(const std::string& path, const std::vector<FlatInstance>& rows,
                      const FlatFileMeta* meta = nullptr);

struct FlatLoadResult {
  std::vector<FlatInstance> rows;
  std::optional<FlatFileMeta> meta;
};

FlatLoadResult read_flat_jsonl(const std::string& path);

}  // namespace disto
