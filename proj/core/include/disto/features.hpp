#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "disto/providers.hpp"

namespace disto {

// Feature blocks extracted for one distractor text, before and after scaling.
struct DistractorFeatures {
  Eigen::VectorXf embedding;
  Eigen::VectorXf pos_tf;
  Eigen::VectorXf ne_tf;
  float length = 0.0f;
  Eigen::VectorXf combined;
};

// Turns distractor texts into fixed-width vectors: sentence embedding,
// POS tag term frequencies, named-entity type term frequencies and token
// length, concatenated and standardised against pool statistics.
class Featurizer {
 public:
  // Learns tag vocabularies and per-dimension scaling from the pool.
  void fit(const std::vector<std::string>& pool_texts, const ProviderSuite& providers);

  bool fitted() const { return fitted_; }
  int dim() const;

  DistractorFeatures featurize(const std::string& txt, const ProviderSuite& providers) const;

  // Featurizes every pool entry into the rows of a matrix.
  Eigen::MatrixXf featurize_all(const std::vector<std::string>& texts,
                                const ProviderSuite& providers) const;

  const std::vector<std::string>& pos_vocab() const { return pos_vocab_; }
  const std::vector<std::string>& ne_vocab() const { return ne_vocab_; }

 private:
  Eigen::VectorXf raw_vector(const std::string& txt, const ProviderSuite& providers,
                             DistractorFeatures* parts) const;

  bool fitted_ = false;
  int embed_dim_ = 0;
  std::vector<std::string> pos_vocab_;
  std::vector<std::string> ne_vocab_;
  Eigen::VectorXf mean_;
  Eigen::VectorXf scale_;
};

}  // namespace disto
