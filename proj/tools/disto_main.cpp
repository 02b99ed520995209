#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "disto/augment.hpp"
#include "disto/bench.hpp"
#include "disto/corpus.hpp"
#include "disto/metric.hpp"
#include "disto/providers.hpp"
#include "disto/rng.hpp"
#include "disto/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// exit code 2: bad invocation or bad config, as opposed to runtime failure
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw UsageError("config: unknown key '" + key + "' in " + where);
}

struct ConfigFile {
  json root = json::object();

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot read " + path);
    ConfigFile cfg;
    try {
      in >> cfg.root;
    } catch (const json::parse_error& e) {
      throw UsageError("config: " + path + ": " + e.what());
    }
    if (!cfg.root.is_object()) throw UsageError("config: top level must be an object");
    check_keys(cfg.root, {"seed", "ingest", "augment", "train", "eval", "score", "bench"},
               "top level");
    return cfg;
  }

  const json* section(const std::string& name, const std::set<std::string>& allowed) const {
    if (!root.contains(name)) return nullptr;
    const json& sec = root.at(name);
    if (!sec.is_object()) throw UsageError("config: section '" + name + "' must be an object");
    check_keys(sec, allowed, "section '" + name + "'");
    return &sec;
  }
};

// config fills in anything the command line left at its default
template <typename T>
void merge(const json* sec, const char* key, const CLI::Option* opt, T& value) {
  if (!sec || (opt && opt->count() > 0) || !sec->contains(key)) return;
  try {
    value = sec->at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError("config: bad value for '" + std::string(key) + "': " + e.what());
  }
}

void merge_seed(const ConfigFile* cfg, const CLI::Option* opt, std::uint64_t& seed) {
  if (!cfg || (opt && opt->count() > 0) || !cfg->root.contains("seed")) return;
  seed = cfg->root.at("seed").get<std::uint64_t>();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

json stats_to_json(const disto::CorpusStats& stats) {
  json j = json::object();
  for (const auto& [split, counts] : stats.per_split)
    j[disto::to_string(split)] = {{"instances", counts.instances},
                                  {"flattened", counts.flattened},
                                  {"augmented", counts.augmented}};
  const auto total = stats.total();
  j["total"] = {{"instances", total.instances},
                {"flattened", total.flattened},
                {"augmented", total.augmented}};
  return j;
}

json eval_to_json(const disto::EvalResult& r) {
  json j{{"mae", r.mae}, {"mae_percent", r.mae_percent}, {"n", r.n}};
  if (r.pearson) {
    j["pearson_r"] = r.pearson->r;
    j["p_value"] = r.pearson->p;
  } else {
    j["pearson_r"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string adapter = "jsonl";
  std::string input;
  std::string out;
  double val_fraction = 0.0;
  std::size_t max_distractors = 3;
  std::uint64_t seed = 0;
  std::string config_path;
};

void cmd_ingest(const IngestArgs& args) {
  auto loaded = disto::load_dataset(args.input, args.adapter);
  for (const auto& err : loaded.errors)
    std::cerr << "ingest: record " << err.record << ": " << err.message << "\n";

  disto::PreprocessOptions opts;
  opts.max_distractors = args.max_distractors;
  auto pre = disto::preprocess(loaded.instances, opts);

  std::vector<disto::MCQInstance> instances;
  if (args.val_fraction > 0.0) {
    std::vector<disto::MCQInstance> train_part, rest;
    for (auto& inst : pre.kept)
      (inst.split == disto::Split::train ? train_part : rest).push_back(std::move(inst));
    auto [remaining, holdout] = disto::split_holdout(train_part, args.val_fraction, args.seed);
    instances = std::move(remaining);
    instances.insert(instances.end(), holdout.begin(), holdout.end());
    instances.insert(instances.end(), rest.begin(), rest.end());
  } else {
    instances = std::move(pre.kept);
  }

  fs::create_directories(args.out);
  const fs::path out(args.out);
  disto::write_mcq_jsonl((out / "corpus.jsonl").string(), instances);
  disto::write_drop_report((out / "drops.jsonl").string(), pre.dropped);
  const auto st = disto::stats(instances, {}, {});
  write_file(out / "stats.json", stats_to_json(st).dump(2) + "\n");

  std::cout << "ingest: kept " << instances.size() << " instances, dropped "
            << pre.dropped.size() << " (" << loaded.errors.size() << " unreadable records)\n";
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

struct AugmentArgs {
  std::string input;
  std::string out;
  int k = 200;
  std::size_t top_n = 10;
  std::vector<std::string> skip;
  int embed_dim = 64;
  std::uint64_t seed = 0;
  std::string config_path;
};

void cmd_augment(const AugmentArgs& args) {
  auto loaded = disto::load_dataset(args.input, "jsonl");
  if (!loaded.errors.empty())
    throw std::runtime_error("augment: " + args.input + " record " +
                             std::to_string(loaded.errors.front().record) + ": " +
                             loaded.errors.front().message);
  if (loaded.instances.empty()) throw std::runtime_error("augment: no instances in " + args.input);

  disto::AugmentOptions options;
  options.mask.top_n = args.top_n;
  for (const auto& skip : args.skip) {
    disto::Provenance p;
    try {
      p = disto::provenance_from_string(skip);
    } catch (const std::exception&) {
      throw UsageError("augment: unknown technique '" + skip + "'");
    }
    if (p == disto::Provenance::gold) throw UsageError("augment: cannot skip gold");
    auto& ts = options.techniques;
    ts.erase(std::remove(ts.begin(), ts.end(), p), ts.end());
  }

  const auto all_gold = disto::flatten(loaded.instances);
  const auto providers = disto::make_builtin_providers(args.embed_dim);
  const int k = std::min<int>(args.k, static_cast<int>(disto::build_pool(all_gold).size()));
  const auto ctx = disto::build_augment_context(all_gold, providers, k, args.seed);

  fs::create_directories(args.out);
  const fs::path out(args.out);
  ctx.index.save((out / "cluster_index.json").string());

  disto::FlatFileMeta meta;
  meta.fields["seed"] = std::to_string(args.seed);
  meta.fields["k"] = std::to_string(k);
  meta.fields["top_n"] = std::to_string(args.top_n);
  std::string techniques;
  for (const auto p : options.techniques) {
    if (!techniques.empty()) techniques += ",";
    techniques += disto::to_string(p);
  }
  meta.fields["techniques"] = techniques;
  for (const auto& [role, identity] : ctx.providers.identities())
    meta.fields["provider_" + role] = identity;

  disto::Rng rng(args.seed);
  std::vector<disto::FlatInstance> all_augmented;
  for (const auto split : {disto::Split::train, disto::Split::validation, disto::Split::test}) {
    std::vector<disto::MCQInstance> part;
    for (const auto& inst : loaded.instances)
      if (inst.split == split) part.push_back(inst);
    if (part.empty()) continue;
    const auto flats = disto::flatten(part);
    auto augmented = disto::augment_all(flats, ctx, rng, options);
    const auto file = out / ("augmented_" + disto::to_string(split) + ".jsonl");
    disto::write_flat_jsonl(file.string(), augmented, &meta);
    std::cout << "augment: " << disto::to_string(split) << ": " << flats.size() << " gold -> "
              << augmented.size() << " rows -> " << file.string() << "\n";
    all_augmented.insert(all_augmented.end(), std::make_move_iterator(augmented.begin()),
                         std::make_move_iterator(augmented.end()));
  }
  const auto st = disto::stats(loaded.instances, disto::flatten(loaded.instances), all_augmented);
  write_file(out / "stats.json", stats_to_json(st).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string train_path;
  std::string val_path;
  std::string test_path;
  std::string out;
  std::string arch = "sept";
  std::vector<std::string> ablate;
  bool ablation_suite = false;
  double lr = 1e-5;
  int batch = 16;
  int patience = 3;
  int epochs = 20;
  int max_seq_len = 512;
  int dim = 48;
  int heads = 2;
  int layers = 2;
  int ffn = 96;
  std::size_t vocab_cap = 8192;
  std::string siamese_head = "affine";
  std::uint64_t seed = 0;
  std::string config_path;
};

disto::AblationMask mask_from_ablate(const std::vector<std::string>& ablate) {
  disto::AblationMask mask;
  for (const auto& field : ablate) {
    if (field == "question") mask.question = false;
    else if (field == "answer") mask.answer = false;
    else if (field == "article") mask.article = false;
    else throw UsageError("train: cannot ablate unknown field '" + field + "'");
  }
  return mask;
}

void cmd_train(const TrainArgs& args) {
  const auto train_rows = disto::read_flat_jsonl(args.train_path).rows;
  const auto val_rows = disto::read_flat_jsonl(args.val_path).rows;

  disto::ScorerConfig sc;
  try {
    sc.architecture = disto::architecture_from_string(args.arch);
    sc.siamese_head = disto::siamese_head_from_string(args.siamese_head);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  sc.ablation = mask_from_ablate(args.ablate);
  sc.max_seq_len = args.max_seq_len;
  sc.d_model = args.dim;
  sc.heads = args.heads;
  sc.layers = args.layers;
  sc.d_ff = args.ffn;
  sc.vocab_cap = args.vocab_cap;

  disto::TrainConfig tc;
  tc.learning_rate = args.lr;
  tc.batch_size = args.batch;
  tc.patience = args.patience;
  tc.max_epochs = args.epochs;
  tc.seed = args.seed;

  fs::create_directories(args.out);
  const fs::path out(args.out);

  if (args.ablation_suite) {
    if (args.test_path.empty())
      throw UsageError("train: --ablation-suite requires --test");
    const auto test_rows = disto::read_flat_jsonl(args.test_path).rows;
    auto suite = disto::ablation_suite(tc, sc, train_rows, val_rows, test_rows);
    json report = json::array();
    for (const auto& entry : suite) {
      std::string dir_name = entry.label == "full" ? "full" : "no_" + entry.label.substr(1);
      const fs::path dir = out / "ablation" / dir_name;
      entry.checkpoint.save(dir.string());
      json row = eval_to_json(entry.result);
      row["variant"] = entry.label;
      row["checkpoint"] = dir.string();
      report.push_back(std::move(row));
    }
    const std::string table = disto::render_ablation_table(suite);
    write_file(out / "ablation_report.txt", table);
    write_file(out / "ablation.json", report.dump(2) + "\n");
    std::cout << table;
    return;
  }

  tc.metrics_log_path = (out / "metrics.csv").string();
  auto checkpoint = disto::train(tc, sc, train_rows, val_rows);
  checkpoint.save((out / "checkpoint").string());
  std::cout << "train: checkpoint saved to " << (out / "checkpoint").string() << " after "
            << checkpoint.metadata().epochs << " epochs\n";

  if (!args.test_path.empty()) {
    const auto test_rows = disto::read_flat_jsonl(args.test_path).rows;
    const auto result = disto::evaluate(checkpoint, test_rows);
    write_file(out / "eval.json", eval_to_json(result).dump(2) + "\n");
    std::cout << "train: test " << eval_to_json(result).dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// eval / score / bench
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::string config_path;
};

void cmd_eval(const EvalArgs& args) {
  const auto checkpoint = disto::ScorerCheckpoint::load(args.checkpoint);
  const auto rows = disto::read_flat_jsonl(args.data).rows;
  const auto result = disto::evaluate(checkpoint, rows);
  const std::string payload = eval_to_json(result).dump(2) + "\n";
  if (!args.out.empty()) write_file(args.out, payload);
  std::cout << payload;
}

struct ScoreArgs {
  std::string checkpoint;
  std::string input;
  std::string out;
  std::string config_path;
};

void cmd_score(const ScoreArgs& args) {
  const auto checkpoint = disto::ScorerCheckpoint::load(args.checkpoint);
  const auto sets = disto::read_generated_jsonl(args.input);
  const auto report = disto::score_corpus(sets, checkpoint);
  if (!args.out.empty()) write_file(args.out, report.to_json());
  std::cout << "score: aggregate " << report.aggregate << " over " << report.instances.size()
            << " instances (checkpoint " << report.checkpoint_fingerprint << ")\n";
}

struct BenchArgs {
  std::string checkpoint;
  std::vector<std::string> models;  // name=path
  std::string ratings;
  std::string ratings_model;
  bool allow_varying_raters = false;
  std::string adapter;
  std::string adapter_name = "external";
  std::string out;
  std::string config_path;
};

void cmd_bench(const BenchArgs& args) {
  if (args.models.empty()) throw UsageError("bench: at least one --model name=path is required");
  std::vector<std::pair<std::string, std::vector<disto::GeneratedSet>>> models;
  for (const auto& spec : args.models) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw UsageError("bench: --model expects name=path, got '" + spec + "'");
    models.emplace_back(spec.substr(0, eq), disto::read_generated_jsonl(spec.substr(eq + 1)));
  }

  const auto checkpoint = disto::ScorerCheckpoint::load(args.checkpoint);
  disto::BenchOptions options;
  if (!args.adapter.empty()) options.external_adapter = args.adapter;
  options.external_name = args.adapter_name;
  auto report = disto::build_report(models, checkpoint, options);

  json extra = json::object();
  if (!args.ratings.empty()) {
    const auto ratings = disto::RatingsFile::load(args.ratings);
    extra["fleiss_kappa"] = disto::fleiss_kappa(ratings, args.allow_varying_raters);

    const std::string which = args.ratings_model.empty() ? models.front().first
                                                         : args.ratings_model;
    const auto it = std::find_if(models.begin(), models.end(),
                                 [&](const auto& m) { return m.first == which; });
    if (it == models.end())
      throw UsageError("bench: --ratings-model '" + which + "' is not among the models");
    std::map<disto::ItemKey, double> scores;
    const auto scored = disto::score_corpus(it->second, checkpoint);
    for (const auto& inst : scored.instances)
      for (std::size_t i = 0; i < inst.per_distractor.size(); ++i)
        scores[{inst.id, static_cast<int>(i)}] = inst.per_distractor[i];
    const auto corr = disto::correlate_with_ratings(scores, ratings);
    extra["human_correlation"] = {{"model", which}, {"r", corr.r}, {"p", corr.p}};
  }

  fs::create_directories(args.out);
  const fs::path out(args.out);
  json payload = json::parse(report.to_json());
  for (auto& [key, value] : extra.items()) payload[key] = value;
  write_file(out / "report.json", payload.dump(2) + "\n");
  write_file(out / "report.txt", report.render());
  std::cout << report.render();
  if (extra.contains("fleiss_kappa"))
    std::cout << "fleiss kappa: " << extra["fleiss_kappa"].get<double>() << "\n";
  if (extra.contains("human_correlation"))
    std::cout << "human correlation (" << extra["human_correlation"]["model"].get<std::string>()
              << "): r " << extra["human_correlation"]["r"].get<double>() << ", p "
              << extra["human_correlation"]["p"].get<double>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DISTO: learned consistency metric for MCQ distractors"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* cmd_i = app.add_subcommand("ingest", "Load, clean, and normalize a source corpus");
  auto* i_adapter = cmd_i->add_option("--adapter", ingest.adapter, "Dataset adapter name");
  auto* i_input = cmd_i->add_option("--input", ingest.input, "Source dataset path");
  auto* i_out = cmd_i->add_option("--out", ingest.out, "Output directory");
  auto* i_vf = cmd_i->add_option("--val-fraction", ingest.val_fraction,
                                 "Carve this fraction of train into validation");
  auto* i_md = cmd_i->add_option("--max-distractors", ingest.max_distractors,
                                 "Keep at most this many distractors per instance");
  auto* i_seed = cmd_i->add_option("--seed", ingest.seed, "Root random seed");
  cmd_i->add_option("--config", ingest.config_path, "JSON config file");

  AugmentArgs augment;
  auto* cmd_a = app.add_subcommand("augment", "Negative-sampling augmentation over a corpus");
  auto* a_input = cmd_a->add_option("--input", augment.input, "Normalized corpus JSONL");
  auto* a_out = cmd_a->add_option("--out", augment.out, "Output directory");
  auto* a_k = cmd_a->add_option("--k", augment.k, "Cluster count (capped at pool size)");
  auto* a_topn = cmd_a->add_option("--top-n", augment.top_n, "Mask-fill candidate pool size");
  auto* a_skip = cmd_a->add_option("--skip", augment.skip, "Technique to skip (repeatable)");
  auto* a_dim = cmd_a->add_option("--embed-dim", augment.embed_dim, "Embedding width");
  auto* a_seed = cmd_a->add_option("--seed", augment.seed, "Root random seed");
  cmd_a->add_option("--config", augment.config_path, "JSON config file");

  TrainArgs train;
  auto* cmd_t = app.add_subcommand("train", "Train a scorer on augmented rows");
  auto* t_train = cmd_t->add_option("--train", train.train_path, "Augmented training JSONL");
  auto* t_val = cmd_t->add_option("--val", train.val_path, "Augmented validation JSONL");
  auto* t_test = cmd_t->add_option("--test", train.test_path, "Augmented test JSONL");
  auto* t_out = cmd_t->add_option("--out", train.out, "Output directory");
  auto* t_arch = cmd_t->add_option("--arch", train.arch, "Architecture: sept, siamese, or bow");
  auto* t_ablate =
      cmd_t->add_option("--ablate", train.ablate, "Context field to drop (repeatable)");
  auto* t_suite = cmd_t->add_flag("--ablation-suite", train.ablation_suite,
                                  "Train full plus all single-field ablations");
  auto* t_lr = cmd_t->add_option("--lr", train.lr, "Learning rate");
  auto* t_batch = cmd_t->add_option("--batch", train.batch, "Batch size");
  auto* t_patience = cmd_t->add_option("--patience", train.patience, "Early-stopping patience");
  auto* t_epochs = cmd_t->add_option("--epochs", train.epochs, "Epoch cap");
  auto* t_msl = cmd_t->add_option("--max-seq-len", train.max_seq_len, "Encoder position budget");
  auto* t_dim = cmd_t->add_option("--dim", train.dim, "Encoder width");
  auto* t_heads = cmd_t->add_option("--heads", train.heads, "Attention heads");
  auto* t_layers = cmd_t->add_option("--layers", train.layers, "Encoder layers");
  auto* t_ffn = cmd_t->add_option("--ffn", train.ffn, "Feed-forward width");
  auto* t_vc = cmd_t->add_option("--vocab-cap", train.vocab_cap, "Vocabulary size cap");
  auto* t_sh = cmd_t->add_option("--siamese-head", train.siamese_head,
                                 "Cosine head: affine or paper_literal");
  auto* t_seed = cmd_t->add_option("--seed", train.seed, "Root random seed");
  cmd_t->add_option("--config", train.config_path, "JSON config file");

  EvalArgs eval;
  auto* cmd_e = app.add_subcommand("eval", "Evaluate a checkpoint on labeled rows");
  auto* e_cp = cmd_e->add_option("--checkpoint", eval.checkpoint, "Checkpoint directory");
  auto* e_data = cmd_e->add_option("--data", eval.data, "Labeled flat JSONL");
  auto* e_out = cmd_e->add_option("--out", eval.out, "Write the JSON result here");
  cmd_e->add_option("--config", eval.config_path, "JSON config file");

  ScoreArgs score;
  auto* cmd_s = app.add_subcommand("score", "Score generated distractors with a checkpoint");
  auto* s_cp = cmd_s->add_option("--checkpoint", score.checkpoint, "Checkpoint directory");
  auto* s_input = cmd_s->add_option("--input", score.input, "Generated-set JSONL");
  auto* s_out = cmd_s->add_option("--out", score.out, "Write the JSON report here");
  cmd_s->add_option("--config", score.config_path, "JSON config file");

  BenchArgs bench;
  auto* cmd_b = app.add_subcommand("bench", "Compare generation models across metrics");
  auto* b_cp = cmd_b->add_option("--checkpoint", bench.checkpoint, "Checkpoint directory");
  auto* b_model =
      cmd_b->add_option("--model", bench.models, "name=generated.jsonl (repeatable)");
  auto* b_ratings = cmd_b->add_option("--ratings", bench.ratings, "Human ratings CSV/JSONL");
  auto* b_rmodel = cmd_b->add_option("--ratings-model", bench.ratings_model,
                                     "Model the ratings refer to (default: first)");
  auto* b_avr = cmd_b->add_flag("--allow-varying-raters", bench.allow_varying_raters,
                                "Tolerate per-item rater count differences in kappa");
  auto* b_adapter =
      cmd_b->add_option("--adapter", bench.adapter, "External metric adapter executable");
  auto* b_aname = cmd_b->add_option("--adapter-name", bench.adapter_name,
                                    "Column name for the external metric");
  auto* b_out = cmd_b->add_option("--out", bench.out, "Output directory");
  cmd_b->add_option("--config", bench.config_path, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_i->parsed()) {
      std::optional<ConfigFile> cfg;
      if (!ingest.config_path.empty()) cfg = ConfigFile::load(ingest.config_path);
      const json* sec = cfg ? cfg->section(
                                  "ingest", {"adapter", "input", "out", "val_fraction",
                                             "max_distractors"})
                            : nullptr;
      merge(sec, "adapter", i_adapter, ingest.adapter);
      merge(sec, "input", i_input, ingest.input);
      merge(sec, "out", i_out, ingest.out);
      merge(sec, "val_fraction", i_vf, ingest.val_fraction);
      merge(sec, "max_distractors", i_md, ingest.max_distractors);
      merge_seed(cfg ? &*cfg : nullptr, i_seed, ingest.seed);
      if (ingest.input.empty()) throw UsageError("ingest: --input is required");
      if (ingest.out.empty()) throw UsageError("ingest: --out is required");
      cmd_ingest(ingest);
    } else if (cmd_a->parsed()) {
      std::optional<ConfigFile> cfg;
      if (!augment.config_path.empty()) cfg = ConfigFile::load(augment.config_path);
      const json* sec =
          cfg ? cfg->section("augment", {"input", "out", "k", "top_n", "skip", "embed_dim"})
              : nullptr;
      merge(sec, "input", a_input, augment.input);
      merge(sec, "out", a_out, augment.out);
      merge(sec, "k", a_k, augment.k);
      merge(sec, "top_n", a_topn, augment.top_n);
      merge(sec, "skip", a_skip, augment.skip);
      merge(sec, "embed_dim", a_dim, augment.embed_dim);
      merge_seed(cfg ? &*cfg : nullptr, a_seed, augment.seed);
      if (augment.input.empty()) throw UsageError("augment: --input is required");
      if (augment.out.empty()) throw UsageError("augment: --out is required");
      cmd_augment(augment);
    } else if (cmd_t->parsed()) {
      std::optional<ConfigFile> cfg;
      if (!train.config_path.empty()) cfg = ConfigFile::load(train.config_path);
      const json* sec =
          cfg ? cfg->section("train", {"train", "val", "test", "out", "arch", "ablate",
                                       "ablation_suite", "lr", "batch", "patience", "epochs",
                                       "max_seq_len", "dim", "heads", "layers", "ffn",
                                       "vocab_cap", "siamese_head"})
              : nullptr;
      merge(sec, "train", t_train, train.train_path);
      merge(sec, "val", t_val, train.val_path);
      merge(sec, "test", t_test, train.test_path);
      merge(sec, "out", t_out, train.out);
      merge(sec, "arch", t_arch, train.arch);
      merge(sec, "ablate", t_ablate, train.ablate);
      merge(sec, "ablation_suite", t_suite, train.ablation_suite);
      merge(sec, "lr", t_lr, train.lr);
      merge(sec, "batch", t_batch, train.batch);
      merge(sec, "patience", t_patience, train.patience);
      merge(sec, "epochs", t_epochs, train.epochs);
      merge(sec, "max_seq_len", t_msl, train.max_seq_len);
      merge(sec, "dim", t_dim, train.dim);
      merge(sec, "heads", t_heads, train.heads);
      merge(sec, "layers", t_layers, train.layers);
      merge(sec, "ffn", t_ffn, train.ffn);
      merge(sec, "vocab_cap", t_vc, train.vocab_cap);
      merge(sec, "siamese_head", t_sh, train.siamese_head);
      merge_seed(cfg ? &*cfg : nullptr, t_seed, train.seed);
      if (train.train_path.empty()) throw UsageError("train: --train is required");
      if (train.val_path.empty()) throw UsageError("train: --val is required");
      if (train.out.empty()) throw UsageError("train: --out is required");
      cmd_train(train);
    } else if (cmd_e->parsed()) {
      std::optional<ConfigFile> cfg;
      if (!eval.config_path.empty()) cfg = ConfigFile::load(eval.config_path);
      const json* sec = cfg ? cfg->section("eval", {"checkpoint", "data", "out"}) : nullptr;
      merge(sec, "checkpoint", e_cp, eval.checkpoint);
      merge(sec, "data", e_data, eval.data);
      merge(sec, "out", e_out, eval.out);
      if (eval.checkpoint.empty()) throw UsageError("eval: --checkpoint is required");
      if (eval.data.empty()) throw UsageError("eval: --data is required");
      cmd_eval(eval);
    } else if (cmd_s->parsed()) {
      std::optional<ConfigFile> cfg;
      if (!score.config_path.empty()) cfg = ConfigFile::load(score.config_path);
      const json* sec = cfg ? cfg->section("score", {"checkpoint", "input", "out"}) : nullptr;
      merge(sec, "checkpoint", s_cp, score.checkpoint);
      merge(sec, "input", s_input, score.input);
      merge(sec, "out", s_out, score.out);
      if (score.checkpoint.empty()) throw UsageError("score: --checkpoint is required");
      if (score.input.empty()) throw UsageError("score: --input is required");
      cmd_score(score);
    } else if (cmd_b->parsed()) {
      std::optional<ConfigFile> cfg;
      if (!bench.config_path.empty()) cfg = ConfigFile::load(bench.config_path);
      const json* sec =
          cfg ? cfg->section("bench", {"checkpoint", "models", "ratings", "ratings_model",
                                       "allow_varying_raters", "adapter", "adapter_name", "out"})
              : nullptr;
      merge(sec, "checkpoint", b_cp, bench.checkpoint);
      merge(sec, "ratings", b_ratings, bench.ratings);
      merge(sec, "ratings_model", b_rmodel, bench.ratings_model);
      merge(sec, "allow_varying_raters", b_avr, bench.allow_varying_raters);
      merge(sec, "adapter", b_adapter, bench.adapter);
      merge(sec, "adapter_name", b_aname, bench.adapter_name);
      merge(sec, "out", b_out, bench.out);
      if (sec && sec->contains("models") && b_model->count() == 0)
        for (const auto& [name, path] : sec->at("models").items())
          bench.models.push_back(name + "=" + path.get<std::string>());
      if (bench.checkpoint.empty()) throw UsageError("bench: --checkpoint is required");
      if (bench.out.empty()) throw UsageError("bench: --out is required");
      cmd_bench(bench);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
