#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "disto/corpus.hpp"
#include "disto/features.hpp"
#include "disto/kmeans.hpp"
#include "disto/providers.hpp"
#include "disto/rng.hpp"

namespace disto {

// Every distinct gold distractor across the corpus, deduplicated on
// normalized text, in first-appearance order.
struct DistractorPool {
  struct Entry {
    std::string text;
    std::string source_id;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, int> norm_index;

  std::size_t size() const { return entries.size(); }
  std::optional<int> find(const std::string& txt) const;
};

DistractorPool build_pool(const std::vector<FlatInstance>& gold_flats);

struct MaskFillOptions {
  std::size_t top_n = 10;
  // when false, each eligible position is replaced with probability 1/2
  // (at least one always is) instead of all of them
  bool replace_all = true;
};

// Everything the pool-dependent techniques need, built once per corpus.
struct AugmentContext {
  DistractorPool pool;
  Featurizer featurizer;
  Eigen::MatrixXf pool_features;  // row i = features of pool entry i
  ClusterIndex index;
  ProviderSuite providers;
};

AugmentContext build_augment_context(const std::vector<FlatInstance>& gold_flats,
                                     const ProviderSuite& providers, int k, std::uint64_t seed);

FlatInstance aug_answer_replication(const FlatInstance& flat);

FlatInstance aug_random(const FlatInstance& flat, const DistractorPool& pool, Rng& rng);

// Index of the member of entry_index's cluster farthest from it, ties broken
// toward the lowest pool index. Returns nullopt for singleton clusters.
std::optional<int> farthest_in_cluster(int entry_index, const ClusterIndex& index,
                                       const Eigen::MatrixXf& features);

// Nullopt when the gold distractor sits alone in its cluster.
std::optional<FlatInstance> aug_cluster_farthest(const FlatInstance& flat,
                                                 const AugmentContext& ctx);

// Nullopt when the distractor has no replaceable content token.
std::optional<FlatInstance> aug_mask_fill(const FlatInstance& flat, const MaskFiller& filler,
                                          Rng& rng, const MaskFillOptions& options = {});

struct AugmentOptions {
  MaskFillOptions mask;
  // techniques to run, in emission order; defaults to all four
  std::vector<Provenance> techniques = {Provenance::ans_replication, Provenance::random_pool,
                                        Provenance::cluster_farthest, Provenance::mask_fill};
};

// Emits each gold row followed by its negatives, one per enabled technique.
// Techniques that cannot apply fall back to a random pool draw; the row keeps
// the slot provenance and records the substitute in its fallback field.
std::vector<FlatInstance> augment_all(const std::vector<FlatInstance>& gold_flats,
                                      const AugmentContext& ctx, Rng& rng,
                                      const AugmentOptions& options = {});

}  // namespace disto
