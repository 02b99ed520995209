#pragma once

#include <Eigen/Core>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace disto {

// Pretrained components (contextual embeddings, taggers, mask filling)
// are consumed through these interfaces. Every implementation carries an
// identity string that is recorded into the artifacts it produces.

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Eigen::VectorXf embed(const std::string& text) const = 0;
  virtual int dim() const = 0;
  virtual std::string identity() const = 0;
};

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // One tag per input token.
  virtual std::vector<std::string> tag(const std::vector<std::string>& tokens) const = 0;
  virtual std::string identity() const = 0;
};

// Noun/verb/adjective tags are the ones eligible for mask substitution.
bool is_content_tag(const std::string& tag);

class NeTagger {
 public:
  virtual ~NeTagger() = default;
  // Entity types found in the text, one per entity, in order.
  virtual std::vector<std::string> entity_types(const std::string& text) const = 0;
  virtual std::string identity() const = 0;
};

class MaskFiller {
 public:
  virtual ~MaskFiller() = default;
  // Top-N candidate replacements for tokens[position], best first. May
  // include the original token; callers filter it out.
  virtual std::vector<std::string> fill(const std::vector<std::string>& tokens,
                                        std::size_t position, std::size_t top_n) const = 0;
  virtual std::string identity() const = 0;
};

struct ProviderSuite {
  std::shared_ptr<const EmbeddingProvider> embedding;
  std::shared_ptr<const PosTagger> pos;
  std::shared_ptr<const NeTagger> ne;
  std::shared_ptr<const MaskFiller> filler;  // may be null until a pool exists

  std::map<std::string, std::string> identities() const;
};

// Built-in providers. Deterministic, dependency-free stand-ins for the
// hosted models the interfaces abstract; swap in heavier implementations
// through the same interfaces.

std::shared_ptr<const EmbeddingProvider> make_hash_embedding(int dim = 64);
std::shared_ptr<const PosTagger> make_rule_pos_tagger();
std::shared_ptr<const NeTagger> make_pattern_ne_tagger();

// Frequency lexicon filler: candidates are the most frequent pool tokens
// sharing the masked token's POS class.
std::shared_ptr<const MaskFiller> make_pos_lexicon_filler(
    const std::vector<std::string>& pool_texts, std::shared_ptr<const PosTagger> tagger);

// Embedding + taggers wired up; the filler is attached once a pool exists.
ProviderSuite make_builtin_providers(int embed_dim = 64);

}  // namespace disto
