#include "disto/augment.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "disto/text.hpp"

namespace disto {

std::optional<int> DistractorPool::find(const std::string& txt) const {
  const auto it = norm_index.find(text::normalize_match(txt));
  if (it == norm_index.end()) return std::nullopt;
  return it->second;
}

DistractorPool build_pool(const std::vector<FlatInstance>& gold_flats) {
  if (gold_flats.empty()) throw std::invalid_argument("build_pool: no gold rows");
  DistractorPool pool;
  for (const auto& flat : gold_flats) {
    if (flat.provenance != Provenance::gold)
      throw std::invalid_argument("build_pool: non-gold row " + flat.id);
    const std::string key = text::normalize_match(flat.distractor);
    if (pool.norm_index.count(key)) continue;
    pool.norm_index.emplace(key, static_cast<int>(pool.entries.size()));
    pool.entries.push_back({flat.distractor, flat.id});
  }
  return pool;
}

AugmentContext build_augment_context(const std::vector<FlatInstance>& gold_flats,
                                     const ProviderSuite& providers, int k, std::uint64_t seed) {
  AugmentContext ctx;
  ctx.pool = build_pool(gold_flats);
  ctx.providers = providers;

  std::vector<std::string> texts;
  texts.reserve(ctx.pool.size());
  for (const auto& e : ctx.pool.entries) texts.push_back(e.text);

  if (!ctx.providers.filler)
    ctx.providers.filler = make_pos_lexicon_filler(texts, ctx.providers.pos);

  ctx.featurizer.fit(texts, ctx.providers);
  ctx.pool_features = ctx.featurizer.featurize_all(texts, ctx.providers);
  ctx.index = fit_clusters(ctx.pool_features, k, seed);
  return ctx;
}

namespace {

FlatInstance negative_from(const FlatInstance& gold, Provenance p, std::string distractor) {
  FlatInstance neg = gold;
  neg.id = gold.id + ":" + to_string(p);
  neg.distractor = std::move(distractor);
  neg.target = 0.0;
  neg.provenance = p;
  neg.fallback.reset();
  return neg;
}

void require_gold(const FlatInstance& flat, const char* op) {
  if (flat.provenance != Provenance::gold)
    throw std::invalid_argument(std::string(op) + ": input row " + flat.id + " is not gold");
}

}  // namespace

FlatInstance aug_answer_replication(const FlatInstance& flat) {
  require_gold(flat, "aug_answer_replication");
  return negative_from(flat, Provenance::ans_replication, flat.answer);
}

FlatInstance aug_random(const FlatInstance& flat, const DistractorPool& pool, Rng& rng) {
  require_gold(flat, "aug_random");
  if (pool.size() < 2) throw std::invalid_argument("aug_random: pool has fewer than 2 entries");
  const std::string gold_key = text::normalize_match(flat.distractor);
  for (;;) {
    const auto& entry = pool.entries[rng.index(pool.size())];
    if (text::normalize_match(entry.text) == gold_key) continue;
    return negative_from(flat, Provenance::random_pool, entry.text);
  }
}

std::optional<int> farthest_in_cluster(int entry_index, const ClusterIndex& index,
                                       const Eigen::MatrixXf& features) {
  const int cluster = index.cluster_of(entry_index);
  const auto& members = index.members.at(static_cast<std::size_t>(cluster));
  const Eigen::RowVectorXf self = features.row(entry_index);
  int best = -1;
  float best_d = -1.0f;
  for (int m : members) {
    if (m == entry_index) continue;
    const float d = (features.row(m) - self).squaredNorm();
    if (d > best_d) {
      best_d = d;
      best = m;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

std::optional<FlatInstance> aug_cluster_farthest(const FlatInstance& flat,
                                                 const AugmentContext& ctx) {
  require_gold(flat, "aug_cluster_farthest");
  const auto pi = ctx.pool.find(flat.distractor);
  if (!pi)
    throw std::invalid_argument("aug_cluster_farthest: distractor of " + flat.id +
                                " is not in the pool");
  const auto far = farthest_in_cluster(*pi, ctx.index, ctx.pool_features);
  if (!far) return std::nullopt;
  return negative_from(flat, Provenance::cluster_farthest, ctx.pool.entries[*far].text);
}

std::optional<FlatInstance> aug_mask_fill(const FlatInstance& flat, const MaskFiller& filler,
                                          Rng& rng, const MaskFillOptions& options) {
  require_gold(flat, "aug_mask_fill");
  const std::vector<std::string> original = text::tokenize(flat.distractor);

  // candidate lists come from the unmodified token sequence; replacements are
  // applied to a copy, one position at a time, left to right
  std::vector<std::pair<std::size_t, std::vector<std::string>>> eligible;
  for (std::size_t i = 0; i < original.size(); ++i) {
    auto cands = filler.fill(original, i, options.top_n);
    const std::string lower = text::lower(original[i]);
    cands.erase(std::remove(cands.begin(), cands.end(), lower), cands.end());
    if (!cands.empty()) eligible.emplace_back(i, std::move(cands));
  }
  if (eligible.empty()) return std::nullopt;

  std::vector<bool> chosen(eligible.size(), true);
  if (!options.replace_all) {
    bool any = false;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
      chosen[i] = rng.uniform() < 0.5;
      any = any || chosen[i];
    }
    if (!any) chosen[rng.index(eligible.size())] = true;
  }

  std::vector<std::string> tokens = original;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (!chosen[i]) continue;
    const auto& [pos, cands] = eligible[i];
    tokens[pos] = cands[rng.index(cands.size())];
  }
  return negative_from(flat, Provenance::mask_fill, text::detokenize(tokens));
}

std::vector<FlatInstance> augment_all(const std::vector<FlatInstance>& gold_flats,
                                      const AugmentContext& ctx, Rng& rng,
                                      const AugmentOptions& options) {
  // sibling gold distractors per parent, for the one-shot clash regeneration
  std::unordered_map<std::string, std::set<std::string>> siblings;
  for (const auto& flat : gold_flats)
    siblings[flat.parent_id].insert(text::normalize_match(flat.distractor));

  const auto clashes = [&](const FlatInstance& gold, const FlatInstance& neg) {
    const auto& sibs = siblings.at(gold.parent_id);
    const std::string key = text::normalize_match(neg.distractor);
    return key != text::normalize_match(gold.distractor) && sibs.count(key) > 0;
  };

  const auto make_negative = [&](const FlatInstance& gold, Provenance p) {
    FlatInstance neg;
    std::optional<std::string> fallback;
    switch (p) {
      case Provenance::ans_replication:
        return aug_answer_replication(gold);
      case Provenance::random_pool:
        neg = aug_random(gold, ctx.pool, rng);
        break;
      case Provenance::cluster_farthest: {
        auto out = aug_cluster_farthest(gold, ctx);
        if (!out) {
          out = aug_random(gold, ctx.pool, rng);
          fallback = to_string(Provenance::random_pool);
        }
        neg = std::move(*out);
        break;
      }
      case Provenance::mask_fill: {
        auto out = aug_mask_fill(gold, *ctx.providers.filler, rng, options.mask);
        if (!out) {
          out = aug_random(gold, ctx.pool, rng);
          fallback = to_string(Provenance::random_pool);
        }
        neg = std::move(*out);
        break;
      }
      case Provenance::gold:
        throw std::logic_error("augment_all: gold is not a technique");
    }
    if (clashes(gold, neg)) {
      // regenerate once, then keep whatever comes out
      if (p == Provenance::random_pool || (fallback && *fallback == "random_pool")) {
        auto redo = aug_random(gold, ctx.pool, rng);
        neg.distractor = std::move(redo.distractor);
      } else if (p == Provenance::mask_fill) {
        if (auto redo = aug_mask_fill(gold, *ctx.providers.filler, rng, options.mask))
          neg.distractor = std::move(redo->distractor);
      }
      // cluster_farthest is deterministic; rerunning cannot change it
    }
    neg.id = gold.id + ":" + to_string(p);
    neg.provenance = p;
    neg.fallback = std::move(fallback);
    return neg;
  };

  std::vector<FlatInstance> out;
  out.reserve(gold_flats.size() * (1 + options.techniques.size()));
  for (const auto& gold : gold_flats) {
    require_gold(gold, "augment_all");
    out.push_back(gold);
    for (Provenance p : options.techniques) out.push_back(make_negative(gold, p));
  }
  return out;
}

}  // namespace disto
