#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "disto/corpus.hpp"
#include "disto/scorer.hpp"

namespace disto {

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 16;
  int patience = 3;
  int max_epochs = 20;
  std::uint64_t seed = 0;
  // when set, one CSV line per evaluation: epoch,step,train_loss,val_mae,val_r
  std::string metrics_log_path;
};

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
};

struct EvalResult {
  double mae = 0.0;
  double mae_percent = 0.0;
  std::optional<PearsonResult> pearson;  // absent when the correlation is undefined
  std::size_t n = 0;
};

class TrainingDivergence : public std::runtime_error {
 public:
  TrainingDivergence(const std::string& what, int epoch, long step)
      : std::runtime_error(what), epoch(epoch), step(step) {}
  int epoch;
  long step;
};

double mae(const std::vector<double>& predictions, const std::vector<double>& targets);

// Product-moment correlation with a two-sided p-value from the t-distribution
// with n-2 degrees of freedom. Throws on n < 3 or zero variance.
PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y);

// Regularized incomplete beta function I_x(a, b), exposed for the p-value path.
double betainc(double a, double b, double x);

ScorerCheckpoint train(const TrainConfig& config, const ScorerConfig& scorer_config,
                       const std::vector<FlatInstance>& train_set,
                       const std::vector<FlatInstance>& val_set);

EvalResult evaluate(const ScorerCheckpoint& checkpoint,
                    const std::vector<FlatInstance>& test_set);

struct AblationEntry {
  std::string label;  // "full", "-question", "-article", "-answer"
  AblationMask mask;
  ScorerCheckpoint checkpoint;
  EvalResult result;
};

// Trains the full model and the three single-field ablations, evaluating each
// on the same test split.
std::vector<AblationEntry> ablation_suite(const TrainConfig& config,
                                          const ScorerConfig& base_config,
                                          const std::vector<FlatInstance>& train_set,
                                          const std::vector<FlatInstance>& val_set,
                                          const std::vector<FlatInstance>& test_set);

std::string render_ablation_table(const std::vector<AblationEntry>& entries);

}  // namespace disto
