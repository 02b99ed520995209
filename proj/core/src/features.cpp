#include "disto/features.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "disto/text.hpp"

namespace disto {

namespace {

Eigen::VectorXf tag_tf(const std::vector<std::string>& tags,
                       const std::vector<std::string>& vocab) {
  Eigen::VectorXf v = Eigen::VectorXf::Zero(static_cast<Eigen::Index>(vocab.size()));
  if (tags.empty()) return v;
  for (const auto& tag : tags) {
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), tag);
    if (it != vocab.end() && *it == tag) v[it - vocab.begin()] += 1.0f;
  }
  v /= static_cast<float>(tags.size());
  return v;
}

}  // namespace

void Featurizer::fit(const std::vector<std::string>& pool_texts, const ProviderSuite& providers) {
  if (pool_texts.empty()) throw std::invalid_argument("featurizer: empty pool");
  if (!providers.embedding || !providers.pos || !providers.ne)
    throw std::invalid_argument("featurizer: provider suite is missing a provider");

  embed_dim_ = providers.embedding->dim();

  std::map<std::string, bool> pos_seen;
  std::map<std::string, bool> ne_seen;
  for (const auto& txt : pool_texts) {
    for (const auto& tag : providers.pos->tag(text::tokenize(txt))) pos_seen[tag] = true;
    for (const auto& type : providers.ne->entity_types(txt)) ne_seen[type] = true;
  }
  pos_vocab_.clear();
  for (const auto& [tag, _] : pos_seen) pos_vocab_.push_back(tag);
  ne_vocab_.clear();
  for (const auto& [type, _] : ne_seen) ne_vocab_.push_back(type);

  const int d = embed_dim_ + static_cast<int>(pos_vocab_.size()) +
                static_cast<int>(ne_vocab_.size()) + 1;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(d);
  for (const auto& txt : pool_texts) {
    const Eigen::VectorXd v = raw_vector(txt, providers, nullptr).cast<double>();
    sum += v;
    sumsq += v.cwiseProduct(v);
  }
  const double n = static_cast<double>(pool_texts.size());
  mean_ = (sum / n).cast<float>();
  Eigen::VectorXd var = sumsq / n - (sum / n).cwiseProduct(sum / n);
  scale_.resize(d);
  for (int i = 0; i < d; ++i) {
    const double sd = std::sqrt(std::max(0.0, var[i]));
    // constant dimensions carry no information; zero them out entirely
    scale_[i] = sd > 1e-8 ? static_cast<float>(1.0 / sd) : 0.0f;
  }
  fitted_ = true;
}

int Featurizer::dim() const {
  if (!fitted_) throw std::logic_error("featurizer: not fitted");
  return embed_dim_ + static_cast<int>(pos_vocab_.size()) + static_cast<int>(ne_vocab_.size()) + 1;
}

Eigen::VectorXf Featurizer::raw_vector(const std::string& txt, const ProviderSuite& providers,
                                       DistractorFeatures* parts) const {
  const auto tokens = text::tokenize(txt);
  Eigen::VectorXf emb = providers.embedding->embed(txt);
  Eigen::VectorXf pos = tag_tf(providers.pos->tag(tokens), pos_vocab_);
  Eigen::VectorXf ne = tag_tf(providers.ne->entity_types(txt), ne_vocab_);
  const float len = static_cast<float>(tokens.size());

  Eigen::VectorXf out(emb.size() + pos.size() + ne.size() + 1);
  out << emb, pos, ne, len;
  if (parts) {
    parts->embedding = std::move(emb);
    parts->pos_tf = std::move(pos);
    parts->ne_tf = std::move(ne);
    parts->length = len;
  }
  return out;
}

DistractorFeatures Featurizer::featurize(const std::string& txt,
                                         const ProviderSuite& providers) const {
  if (!fitted_) throw std::logic_error("featurizer: not fitted");
  DistractorFeatures f;
  Eigen::VectorXf raw = raw_vector(txt, providers, &f);
  f.combined = (raw - mean_).cwiseProduct(scale_);
  return f;
}

Eigen::MatrixXf Featurizer::featurize_all(const std::vector<std::string>& texts,
                                          const ProviderSuite& providers) const {
  Eigen::MatrixXf m(static_cast<Eigen::Index>(texts.size()), dim());
  for (std::size_t i = 0; i < texts.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = featurize(texts[i], providers).combined;
  return m;
}

}  // namespace disto
