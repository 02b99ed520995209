#include "disto/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "disto/nn.hpp"
#include "disto/rng.hpp"
#include "disto/text.hpp"

namespace disto {

double mae(const std::vector<double>& predictions, const std::vector<double>& targets) {
  if (predictions.empty()) throw std::invalid_argument("mae: empty input");
  if (predictions.size() != targets.size())
    throw std::invalid_argument("mae: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    sum += std::abs(predictions[i] - targets[i]);
  return sum / static_cast<double>(predictions.size());
}

namespace {

// continued fraction for the incomplete beta function, evaluated with
// Lentz's method
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double eps = 1e-15;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double betainc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("pearson: need at least 3 samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::domain_error("pearson: undefined correlation, zero variance input");
  PearsonResult out;
  out.r = sxy / std::sqrt(sxx * syy);
  out.r = std::clamp(out.r, -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - out.r * out.r;
  if (denom <= 0.0) {
    out.p = 0.0;
  } else {
    const double t2 = out.r * out.r * df / denom;
    out.p = betainc(df / 2.0, 0.5, df / (df + t2));
  }
  return out;
}

EvalResult evaluate(const ScorerCheckpoint& checkpoint,
                    const std::vector<FlatInstance>& test_set) {
  if (test_set.empty()) throw std::invalid_argument("evaluate: empty test set");
  std::vector<double> scores, targets;
  scores.reserve(test_set.size());
  targets.reserve(test_set.size());
  for (const auto& flat : test_set) {
    scores.push_back(checkpoint.score(bundle_from(flat)));
    targets.push_back(flat.target);
  }
  EvalResult out;
  out.n = test_set.size();
  out.mae = mae(scores, targets);
  out.mae_percent = 100.0 * out.mae;
  try {
    out.pearson = pearson(scores, targets);
  } catch (const std::exception&) {
    out.pearson.reset();
  }
  return out;
}

namespace {

void check_rows(const std::vector<FlatInstance>& rows, const char* which) {
  if (rows.empty()) throw std::invalid_argument(std::string("train: empty ") + which + " split");
  for (const auto& row : rows)
    if (!(row.target >= 0.0 && row.target <= 1.0))
      throw std::invalid_argument("train: target outside [0,1] in row " + row.id);
}

std::string data_fingerprint(const std::vector<FlatInstance>& rows) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& row : rows) {
    h ^= text::fnv1a64(row.id);
    h *= 0x100000001b3ull;
    h ^= text::fnv1a64(row.distractor);
    h *= 0x100000001b3ull;
    h ^= static_cast<std::uint64_t>(row.target * 1e9);
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> field_texts(const std::vector<FlatInstance>& rows) {
  std::vector<std::string> out;
  out.reserve(rows.size() * 4);
  for (const auto& row : rows) {
    out.push_back(row.question);
    out.push_back(row.answer);
    out.push_back(row.distractor);
    out.push_back(row.article);
  }
  return out;
}

class MetricsLog {
 public:
  explicit MetricsLog(const std::string& path) {
    if (path.empty()) return;
    out_.open(path);
    if (!out_) throw std::runtime_error("train: cannot write metrics log " + path);
    out_ << "epoch,step,train_loss,val_mae,val_r\n";
  }

  void line(int epoch, long step, double train_loss, double val_mae,
            const std::optional<PearsonResult>& val_r) {
    if (!out_.is_open()) return;
    out_ << epoch << ',' << step << ',' << train_loss << ',' << val_mae << ',';
    if (val_r) out_ << val_r->r;
    out_ << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

ScorerCheckpoint train_bow(const TrainConfig& config, const ScorerConfig& scorer_config,
                           const std::vector<FlatInstance>& train_set,
                           const std::vector<FlatInstance>& val_set) {
  Assembler assembler(scorer_config.max_seq_len);
  std::vector<std::string> texts;
  std::vector<double> targets;
  texts.reserve(train_set.size());
  for (const auto& row : train_set) {
    texts.push_back(assembler.sept(bundle_from(row, scorer_config.ablation)).text);
    targets.push_back(row.target);
  }
  ScorerCheckpoint cp =
      ScorerCheckpoint::create_bow(scorer_config, BowModel::fit(texts, targets));
  cp.metadata().seed = config.seed;
  cp.metadata().data_fingerprint = data_fingerprint(train_set);
  cp.metadata().epochs = 0;

  double train_loss = 0.0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const double d = cp.bow_model().predict(texts[i]) - targets[i];
    train_loss += d * d;
  }
  train_loss /= static_cast<double>(texts.size());
  const EvalResult val = evaluate(cp, val_set);
  cp.metadata().metrics["best_val_mae"] = val.mae;
  if (val.pearson) cp.metadata().metrics["best_val_r"] = val.pearson->r;
  MetricsLog log(config.metrics_log_path);
  log.line(0, 0, train_loss, val.mae, val.pearson);
  return cp;
}

struct EncoderInputs {
  // sept uses ids_a only; siamese uses both branches
  std::vector<std::vector<int>> ids_a, ids_b;
  std::vector<double> targets;
};

EncoderInputs assemble_rows(const std::vector<FlatInstance>& rows, const Assembler& assembler,
                            const ScorerConfig& scorer_config) {
  EncoderInputs inputs;
  inputs.ids_a.reserve(rows.size());
  inputs.targets.reserve(rows.size());
  const bool siamese = scorer_config.architecture == Architecture::siamese;
  if (siamese) inputs.ids_b.reserve(rows.size());
  for (const auto& row : rows) {
    const ContextBundle bundle = bundle_from(row, scorer_config.ablation);
    if (siamese) {
      auto [ctx, dis] = assembler.siamese(bundle);
      inputs.ids_a.push_back(std::move(ctx.ids));
      inputs.ids_b.push_back(std::move(dis.ids));
    } else {
      inputs.ids_a.push_back(assembler.sept(bundle).ids);
    }
    inputs.targets.push_back(row.target);
  }
  return inputs;
}

}  // namespace

ScorerCheckpoint train(const TrainConfig& config, const ScorerConfig& scorer_config,
                       const std::vector<FlatInstance>& train_set,
                       const std::vector<FlatInstance>& val_set) {
  if (config.learning_rate <= 0.0) throw std::invalid_argument("train: learning rate must be > 0");
  if (config.patience < 1) throw std::invalid_argument("train: patience must be >= 1");
  if (config.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  check_rows(train_set, "train");
  check_rows(val_set, "validation");

  if (scorer_config.architecture == Architecture::bow)
    return train_bow(config, scorer_config, train_set, val_set);

  const Vocabulary vocab = Vocabulary::build(field_texts(train_set), scorer_config.vocab_cap);
  ScorerCheckpoint cp = ScorerCheckpoint::create(scorer_config, vocab, config.seed);
  const bool siamese = scorer_config.architecture == Architecture::siamese;

  const Assembler assembler(scorer_config.max_seq_len, &vocab);
  const EncoderInputs tr = assemble_rows(train_set, assembler, scorer_config);
  const EncoderInputs va = assemble_rows(val_set, assembler, scorer_config);

  auto params = siamese ? cp.siamese_model().params() : cp.sept_model().params();
  nn::Adam<float> adam;
  adam.lr = config.learning_rate;

  const auto predict = [&](const EncoderInputs& set, std::size_t i) -> double {
    if (siamese) return cp.siamese_model().score(set.ids_a[i], set.ids_b[i]);
    return cp.sept_model().score(set.ids_a[i]);
  };

  const auto val_metrics = [&]() {
    std::vector<double> scores(va.targets.size());
    for (std::size_t i = 0; i < va.targets.size(); ++i) scores[i] = predict(va, i);
    const double m = mae(scores, va.targets);
    std::optional<PearsonResult> r;
    try {
      r = pearson(scores, va.targets);
    } catch (const std::exception&) {
    }
    return std::pair(m, r);
  };

  MetricsLog log(config.metrics_log_path);
  Rng rng(Rng(config.seed).fork(0x7261694e));

  std::vector<std::size_t> order(tr.targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::string best_weights;
  double best_val_mae = std::numeric_limits<double>::infinity();
  std::optional<PearsonResult> best_val_r;
  int best_epoch = 0, bad_evals = 0, epochs_run = 0;
  long step = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const auto bn = static_cast<float>(end - start);
      nn::zero_grads(params);
      for (std::size_t pos = start; pos < end; ++pos) {
        const std::size_t i = order[pos];
        const auto target = static_cast<float>(tr.targets[i]);
        float s;
        if (siamese) {
          typename nn::SiameseModel<float>::State st;
          s = cp.siamese_model().forward(tr.ids_a[i], tr.ids_b[i], st);
          cp.siamese_model().backward(st, 2.0f * (s - target) / bn);
        } else {
          typename nn::SeptModel<float>::State st;
          s = cp.sept_model().forward(tr.ids_a[i], st);
          cp.sept_model().backward(st, 2.0f * (s - target) / bn);
        }
        const double d = static_cast<double>(s) - tr.targets[i];
        epoch_loss += d * d;
        if (!std::isfinite(s))
          throw TrainingDivergence("train: non-finite score at epoch " + std::to_string(epoch) +
                                       ", step " + std::to_string(step) + ", row " +
                                       train_set[i].id + ", lr " +
                                       std::to_string(config.learning_rate),
                                   epoch, step);
      }
      adam.step(params);
      ++step;
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss))
      throw TrainingDivergence("train: non-finite epoch loss at epoch " + std::to_string(epoch) +
                                   ", lr " + std::to_string(config.learning_rate),
                               epoch, step);

    const auto [val_mae, val_r] = val_metrics();
    log.line(epoch, step, epoch_loss, val_mae, val_r);
    epochs_run = epoch;

    if (val_mae < best_val_mae) {
      best_val_mae = val_mae;
      best_val_r = val_r;
      best_epoch = epoch;
      std::ostringstream buf;
      nn::save_params(buf, params);
      best_weights = buf.str();
      bad_evals = 0;
    } else {
      if (++bad_evals >= config.patience) break;
    }
  }

  if (!best_weights.empty()) {
    std::istringstream buf(best_weights);
    nn::load_params(buf, params);
  }
  cp.metadata().seed = config.seed;
  cp.metadata().data_fingerprint = data_fingerprint(train_set);
  cp.metadata().epochs = epochs_run;
  cp.metadata().metrics["best_epoch"] = best_epoch;
  cp.metadata().metrics["best_val_mae"] = best_val_mae;
  if (best_val_r) cp.metadata().metrics["best_val_r"] = best_val_r->r;
  return cp;
}

std::vector<AblationEntry> ablation_suite(const TrainConfig& config,
                                          const ScorerConfig& base_config,
                                          const std::vector<FlatInstance>& train_set,
                                          const std::vector<FlatInstance>& val_set,
                                          const std::vector<FlatInstance>& test_set) {
  struct Variant {
    const char* label;
    AblationMask mask;
  };
  const Variant variants[] = {
      {"full", {true, true, true}},
      {"-question", {false, true, true}},
      {"-article", {true, true, false}},
      {"-answer", {true, false, true}},
  };
  std::vector<AblationEntry> out;
  out.reserve(4);
  for (const auto& variant : variants) {
    ScorerConfig sc = base_config;
    sc.ablation = variant.mask;
    AblationEntry entry;
    entry.label = variant.label;
    entry.mask = variant.mask;
    entry.checkpoint = train(config, sc, train_set, val_set);
    entry.result = evaluate(entry.checkpoint, test_set);
    out.push_back(std::move(entry));
  }
  return out;
}

std::string render_ablation_table(const std::vector<AblationEntry>& entries) {
  std::ostringstream out;
  out << "Model              MAE (%)   Pearson r (%)\n";
  out << "-----------------  --------  -------------\n";
  for (const auto& e : entries) {
    std::string name = "DISTO";
    if (e.label == "-question") name = "DISTO - Question";
    else if (e.label == "-article") name = "DISTO - Article";
    else if (e.label == "-answer") name = "DISTO - Answer";
    char line[96];
    if (e.result.pearson)
      std::snprintf(line, sizeof(line), "%-17s  %8.2f  %13.2f\n", name.c_str(),
                    e.result.mae_percent, 100.0 * e.result.pearson->r);
    else
      std::snprintf(line, sizeof(line), "%-17s  %8.2f  %13s\n", name.c_str(),
                    e.result.mae_percent, "n/a");
    out << line;
  }
  return out.str();
}

}  // namespace disto
