#include "disto/scorer.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "disto/nn.hpp"
#include "disto/text.hpp"

namespace fs = std::filesystem;

namespace disto {

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::sept: return "sept";
    case Architecture::siamese: return "siamese";
    case Architecture::bow: return "bow";
  }
  throw std::logic_error("unknown architecture");
}

Architecture architecture_from_string(const std::string& s) {
  if (s == "sept") return Architecture::sept;
  if (s == "siamese") return Architecture::siamese;
  if (s == "bow") return Architecture::bow;
  throw std::invalid_argument("unknown architecture: " + s);
}

std::string to_string(SiameseHead h) {
  return h == SiameseHead::affine ? "affine" : "paper_literal";
}

SiameseHead siamese_head_from_string(const std::string& s) {
  if (s == "affine") return SiameseHead::affine;
  if (s == "paper_literal") return SiameseHead::paper_literal;
  throw std::invalid_argument("unknown siamese head: " + s);
}

double siamese_head_value(double cosine, SiameseHead head, double alpha, double beta) {
  const double z = head == SiameseHead::affine ? alpha * cosine + beta : cosine;
  return 1.0 / (1.0 + std::exp(-z));
}

namespace {

nlohmann::json config_to_json(const ScorerConfig& c) {
  nlohmann::json j;
  j["architecture"] = to_string(c.architecture);
  j["encoder_identity"] = c.encoder_identity;
  j["ablation"] = {{"question", c.ablation.question},
                   {"answer", c.ablation.answer},
                   {"article", c.ablation.article}};
  j["siamese_head"] = to_string(c.siamese_head);
  j["max_seq_len"] = c.max_seq_len;
  j["d_model"] = c.d_model;
  j["heads"] = c.heads;
  j["layers"] = c.layers;
  j["d_ff"] = c.d_ff;
  j["vocab_cap"] = c.vocab_cap;
  j["special_tokens"] = {"[PAD]", "[UNK]", "[CLS]", "[QUES]", "[ANS]", "[DIS]", "[ART]"};
  return j;
}

ScorerConfig config_from_json(const nlohmann::json& j) {
  ScorerConfig c;
  c.architecture = architecture_from_string(j.at("architecture").get<std::string>());
  c.encoder_identity = j.at("encoder_identity").get<std::string>();
  const auto& abl = j.at("ablation");
  c.ablation.question = abl.at("question").get<bool>();
  c.ablation.answer = abl.at("answer").get<bool>();
  c.ablation.article = abl.at("article").get<bool>();
  c.siamese_head = siamese_head_from_string(j.at("siamese_head").get<std::string>());
  c.max_seq_len = j.at("max_seq_len").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.heads = j.at("heads").get<int>();
  c.layers = j.at("layers").get<int>();
  c.d_ff = j.at("d_ff").get<int>();
  c.vocab_cap = j.at("vocab_cap").get<std::size_t>();
  return c;
}

nn::EncoderConfig encoder_config(const ScorerConfig& c, std::size_t vocab_size) {
  nn::EncoderConfig e;
  e.vocab = static_cast<int>(vocab_size);
  e.d_model = c.d_model;
  e.heads = c.heads;
  e.layers = c.layers;
  e.d_ff = c.d_ff;
  e.max_positions = c.max_seq_len;
  return e;
}

}  // namespace

struct ScorerCheckpoint::Impl {
  ScorerConfig config;
  Vocabulary vocab;
  TrainingMetadata metadata;
  std::unique_ptr<nn::SeptModel<float>> sept;
  std::unique_ptr<nn::SiameseModel<float>> siamese;
  BowModel bow;
};

ScorerCheckpoint::ScorerCheckpoint() : impl_(std::make_unique<Impl>()) {}
ScorerCheckpoint::~ScorerCheckpoint() = default;
ScorerCheckpoint::ScorerCheckpoint(ScorerCheckpoint&&) noexcept = default;
ScorerCheckpoint& ScorerCheckpoint::operator=(ScorerCheckpoint&&) noexcept = default;

ScorerCheckpoint ScorerCheckpoint::create(const ScorerConfig& config, const Vocabulary& vocab,
                                          std::uint64_t seed) {
  if (config.architecture == Architecture::bow)
    throw std::invalid_argument("scorer: use create_bow for the bow architecture");
  ScorerCheckpoint cp;
  cp.impl_->config = config;
  cp.impl_->vocab = vocab;
  cp.impl_->metadata.seed = seed;
  if (config.architecture == Architecture::sept) {
    cp.impl_->sept = std::make_unique<nn::SeptModel<float>>();
    cp.impl_->sept->init(encoder_config(config, vocab.size()), seed);
  } else {
    cp.impl_->siamese = std::make_unique<nn::SiameseModel<float>>();
    cp.impl_->siamese->init(encoder_config(config, vocab.size()), seed,
                            config.siamese_head == SiameseHead::affine);
  }
  return cp;
}

ScorerCheckpoint ScorerCheckpoint::create_bow(const ScorerConfig& config, BowModel model) {
  if (config.architecture != Architecture::bow)
    throw std::invalid_argument("scorer: create_bow requires the bow architecture");
  ScorerCheckpoint cp;
  cp.impl_->config = config;
  cp.impl_->bow = std::move(model);
  return cp;
}

const ScorerConfig& ScorerCheckpoint::config() const { return impl_->config; }
const Vocabulary& ScorerCheckpoint::vocabulary() const { return impl_->vocab; }
const TrainingMetadata& ScorerCheckpoint::metadata() const { return impl_->metadata; }
TrainingMetadata& ScorerCheckpoint::metadata() { return impl_->metadata; }

nn::SeptModel<float>& ScorerCheckpoint::sept_model() {
  if (!impl_->sept) throw std::logic_error("scorer: checkpoint is not a sept model");
  return *impl_->sept;
}
const nn::SeptModel<float>& ScorerCheckpoint::sept_model() const {
  if (!impl_->sept) throw std::logic_error("scorer: checkpoint is not a sept model");
  return *impl_->sept;
}
nn::SiameseModel<float>& ScorerCheckpoint::siamese_model() {
  if (!impl_->siamese) throw std::logic_error("scorer: checkpoint is not a siamese model");
  return *impl_->siamese;
}
const nn::SiameseModel<float>& ScorerCheckpoint::siamese_model() const {
  if (!impl_->siamese) throw std::logic_error("scorer: checkpoint is not a siamese model");
  return *impl_->siamese;
}
BowModel& ScorerCheckpoint::bow_model() {
  if (impl_->config.architecture != Architecture::bow)
    throw std::logic_error("scorer: checkpoint is not a bow model");
  return impl_->bow;
}
const BowModel& ScorerCheckpoint::bow_model() const {
  if (impl_->config.architecture != Architecture::bow)
    throw std::logic_error("scorer: checkpoint is not a bow model");
  return impl_->bow;
}

namespace {

nlohmann::json metadata_to_json(const TrainingMetadata& m) {
  return nlohmann::json{{"seed", m.seed},
                        {"data_fingerprint", m.data_fingerprint},
                        {"epochs", m.epochs},
                        {"metrics", m.metrics}};
}

TrainingMetadata metadata_from_json(const nlohmann::json& j) {
  TrainingMetadata m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.data_fingerprint = j.at("data_fingerprint").get<std::string>();
  m.epochs = j.at("epochs").get<int>();
  m.metrics = j.at("metrics").get<std::map<std::string, double>>();
  return m;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("scorer: cannot write " + path.string());
  out << content;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scorer: cannot read " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

void ScorerCheckpoint::save(const std::string& dir) const {
  fs::create_directories(dir);
  const fs::path root(dir);
  write_text(root / "config.json", config_to_json(impl_->config).dump(2) + "\n");
  write_text(root / "metadata.json", metadata_to_json(impl_->metadata).dump(2) + "\n");
  if (impl_->config.architecture == Architecture::bow) {
    write_text(root / "bow.json", impl_->bow.to_json().dump() + "\n");
    return;
  }
  impl_->vocab.save((root / "vocab.txt").string());
  auto params = impl_->sept
                    ? const_cast<nn::SeptModel<float>&>(*impl_->sept).params()
                    : const_cast<nn::SiameseModel<float>&>(*impl_->siamese).params();
  nn::save_params((root / "weights.bin").string(), params);
}

ScorerCheckpoint ScorerCheckpoint::load(const std::string& dir) {
  const fs::path root(dir);
  const ScorerConfig config = config_from_json(read_json(root / "config.json"));
  ScorerCheckpoint cp;
  if (config.architecture == Architecture::bow) {
    cp = create_bow(config, BowModel::from_json(read_json(root / "bow.json")));
  } else {
    const Vocabulary vocab = Vocabulary::load((root / "vocab.txt").string());
    cp = create(config, vocab, /*seed=*/0);
    auto params = cp.impl_->sept ? cp.impl_->sept->params() : cp.impl_->siamese->params();
    nn::load_params((root / "weights.bin").string(), params);
  }
  cp.impl_->metadata = metadata_from_json(read_json(root / "metadata.json"));
  return cp;
}

std::uint64_t ScorerCheckpoint::fingerprint() const {
  std::ostringstream buf;
  buf << config_to_json(impl_->config).dump();
  if (impl_->config.architecture == Architecture::bow) {
    buf << impl_->bow.to_json().dump();
  } else {
    auto params = impl_->sept ? const_cast<nn::SeptModel<float>&>(*impl_->sept).params()
                              : const_cast<nn::SiameseModel<float>&>(*impl_->siamese).params();
    nn::save_params(buf, params);
  }
  return text::fnv1a64(buf.str());
}

double score_sept(const AssembledInput& input, const ScorerCheckpoint& checkpoint) {
  if (checkpoint.config().architecture != Architecture::sept)
    throw std::invalid_argument("score_sept: checkpoint architecture is " +
                                to_string(checkpoint.config().architecture));
  if (input.ids.empty())
    throw std::invalid_argument("score_sept: input was assembled without a vocabulary");
  return static_cast<double>(checkpoint.sept_model().score(input.ids));
}

double score_siamese(const AssembledInput& context_branch,
                     const AssembledInput& distractor_branch,
                     const ScorerCheckpoint& checkpoint) {
  if (checkpoint.config().architecture != Architecture::siamese)
    throw std::invalid_argument("score_siamese: checkpoint architecture is " +
                                to_string(checkpoint.config().architecture));
  if (context_branch.ids.empty() || distractor_branch.ids.empty())
    throw std::invalid_argument("score_siamese: inputs were assembled without a vocabulary");
  return static_cast<double>(
      checkpoint.siamese_model().score(context_branch.ids, distractor_branch.ids));
}

double score_bow(const ContextBundle& bundle, const ScorerCheckpoint& checkpoint) {
  if (checkpoint.config().architecture != Architecture::bow)
    throw std::invalid_argument("score_bow: checkpoint architecture is " +
                                to_string(checkpoint.config().architecture));
  if (!checkpoint.bow_model().fitted()) throw std::logic_error("score_bow: model not fitted");
  Assembler assembler(checkpoint.config().max_seq_len);
  return checkpoint.bow_model().predict(assembler.sept(bundle).text);
}

double ScorerCheckpoint::score(const ContextBundle& bundle) const {
  ContextBundle masked = bundle;
  masked.mask = impl_->config.ablation;
  if (impl_->config.architecture == Architecture::bow) return score_bow(masked, *this);
  Assembler assembler(impl_->config.max_seq_len, &impl_->vocab);
  if (impl_->config.architecture == Architecture::sept)
    return score_sept(assembler.sept(masked), *this);
  const auto [ctx, dis] = assembler.siamese(masked);
  return score_siamese(ctx, dis, *this);
}

}  // namespace disto
