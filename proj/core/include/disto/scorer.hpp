#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "disto/assembly.hpp"
#include "disto/bow.hpp"
#include "disto/vocab.hpp"

namespace disto {

enum class Architecture { sept, siamese, bow };
enum class SiameseHead { affine, paper_literal };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);
std::string to_string(SiameseHead h);
SiameseHead siamese_head_from_string(const std::string& s);

struct ScorerConfig {
  Architecture architecture = Architecture::sept;
  std::string encoder_identity = "builtin-tiny/v1";
  AblationMask ablation;
  SiameseHead siamese_head = SiameseHead::affine;
  int max_seq_len = 512;
  int d_model = 48;
  int heads = 2;
  int layers = 2;
  int d_ff = 96;
  std::size_t vocab_cap = 8192;
};

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::string data_fingerprint;
  int epochs = 0;
  std::map<std::string, double> metrics;
};

namespace nn {
template <typename Scalar>
class SeptModel;
template <typename Scalar>
class SiameseModel;
}  // namespace nn

// A trained scorer plus everything needed to reproduce its inputs: config,
// vocabulary, weights, and training metadata. Immutable once saved; all
// scoring paths are deterministic.
class ScorerCheckpoint {
 public:
  ScorerCheckpoint();
  ~ScorerCheckpoint();
  ScorerCheckpoint(ScorerCheckpoint&&) noexcept;
  ScorerCheckpoint& operator=(ScorerCheckpoint&&) noexcept;

  // freshly initialized sept/siamese model parameters drawn from seed
  static ScorerCheckpoint create(const ScorerConfig& config, const Vocabulary& vocab,
                                 std::uint64_t seed);
  static ScorerCheckpoint create_bow(const ScorerConfig& config, BowModel model);

  void save(const std::string& dir) const;
  static ScorerCheckpoint load(const std::string& dir);

  const ScorerConfig& config() const;
  const Vocabulary& vocabulary() const;
  const TrainingMetadata& metadata() const;
  TrainingMetadata& metadata();
  std::uint64_t fingerprint() const;

  // assembles the bundle under the checkpoint's ablation mask and scores it
  double score(const ContextBundle& bundle) const;

  nn::SeptModel<float>& sept_model();
  const nn::SeptModel<float>& sept_model() const;
  nn::SiameseModel<float>& siamese_model();
  const nn::SiameseModel<float>& siamese_model() const;
  BowModel& bow_model();
  const BowModel& bow_model() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double score_sept(const AssembledInput& input, const ScorerCheckpoint& checkpoint);
double score_siamese(const AssembledInput& context_branch, const AssembledInput& distractor_branch,
                     const ScorerCheckpoint& checkpoint);
double score_bow(const ContextBundle& bundle, const ScorerCheckpoint& checkpoint);

// The head mapping cosine similarity to a score, factored out for testing.
double siamese_head_value(double cosine, SiameseHead head, double alpha = 1.0, double beta = 0.0);

}  // namespace disto
