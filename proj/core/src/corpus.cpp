#include "disto/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "disto/rng.hpp"
#include "disto/text.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace disto {

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "validation" || s == "val" || s == "dev") return Split::validation;
  if (s == "test") return Split::test;
  throw std::invalid_argument("unknown split: " + s);
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::gold: return "gold";
    case Provenance::ans_replication: return "ans_replication";
    case Provenance::random_pool: return "random_pool";
    case Provenance::cluster_farthest: return "cluster_farthest";
    case Provenance::mask_fill: return "mask_fill";
  }
  return "gold";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "gold") return Provenance::gold;
  if (s == "ans_replication") return Provenance::ans_replication;
  if (s == "random_pool") return Provenance::random_pool;
  if (s == "cluster_farthest") return Provenance::cluster_farthest;
  if (s == "mask_fill") return Provenance::mask_fill;
  throw std::invalid_argument("unknown provenance: " + s);
}

SplitCounts CorpusStats::total() const {
  SplitCounts t;
  for (const auto& [_, c] : per_split) {
    t.instances += c.instances;
    t.flattened += c.flattened;
    t.augmented += c.augmented;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Adapters
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, AdapterFn>& adapter_registry() {
  static std::map<std::string, AdapterFn> reg;
  return reg;
}

Split split_from_path(const fs::path& p) {
  for (const auto& part : p) {
    const std::string s = text::lower(part.string());
    if (s == "train" || s == "train.json" || s == "train.jsonl") return Split::train;
    if (s == "dev" || s == "valid" || s == "validation" || s == "valid.json" || s == "dev.json")
      return Split::validation;
    if (s == "test" || s == "test.json" || s == "test.jsonl") return Split::test;
  }
  return Split::train;
}

// Normalized JSONL, one MCQInstance per line.
LoadResult adapt_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  LoadResult res;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      res.errors.push_back({lineno, "line " + std::to_string(lineno) + ": invalid JSON"});
      continue;
    }
    if (j.contains("_meta")) continue;
    try {
      MCQInstance inst;
      inst.id = j.at("id").get<std::string>();
      inst.dataset = j.value("dataset", "unknown");
      inst.split = split_from_string(j.value("split", "train"));
      inst.article = j.at("article").get<std::string>();
      inst.question = j.at("question").get<std::string>();
      inst.answer = j.at("answer").get<std::string>();
      for (const auto& d : j.at("distractors")) inst.distractors.push_back(d.get<std::string>());
      res.instances.push_back(std::move(inst));
    } catch (const std::exception& e) {
      res.errors.push_back({lineno, "line " + std::to_string(lineno) + ": " + e.what()});
    }
  }
  return res;
}

std::vector<fs::path> files_under(const std::string& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& ent : fs::recursive_directory_iterator(path))
      if (ent.is_regular_file()) files.push_back(ent.path());
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(path);
  }
  return files;
}

// RACE layout: one JSON document per file with parallel arrays
// questions / options / answers and a shared article.
LoadResult adapt_race(const std::string& path) {
  if (!fs::exists(path)) throw std::runtime_error("cannot open dataset path: " + path);
  LoadResult res;
  std::size_t fileno = 0;
  for (const auto& file : files_under(path)) {
    ++fileno;
    std::ifstream in(file);
    std::stringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      res.errors.push_back({fileno, file.string() + ": invalid JSON document"});
      continue;
    }
    try {
      const std::string article = j.at("article").get<std::string>();
      const std::string doc_id = j.value("id", file.filename().string());
      const auto& questions = j.at("questions");
      const auto& options = j.at("options");
      const auto& answers = j.at("answers");
      if (questions.size() != options.size() || questions.size() != answers.size())
        throw std::runtime_error("questions/options/answers length mismatch");
      const Split split = split_from_path(file);
      for (std::size_t q = 0; q < questions.size(); ++q) {
        const std::string letter = answers[q].get<std::string>();
        if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z')
          throw std::runtime_error("bad answer letter '" + letter + "'");
        const std::size_t ans_idx = static_cast<std::size_t>(letter[0] - 'A');
        const auto& opts = options[q];
        if (ans_idx >= opts.size()) throw std::runtime_error("answer index out of range");
        MCQInstance inst;
        inst.id = doc_id + "#" + std::to_string(q);
        inst.dataset = "race";
        inst.split = split;
        inst.article = article;
        inst.question = questions[q].get<std::string>();
        inst.answer = opts[ans_idx].get<std::string>();
        for (std::size_t o = 0; o < opts.size(); ++o)
          if (o != ans_idx) inst.distractors.push_back(opts[o].get<std::string>());
        res.instances.push_back(std::move(inst));
      }
    } catch (const std::exception& e) {
      res.errors.push_back({fileno, file.string() + ": " + e.what()});
    }
  }
  return res;
}

// SciQ layout: one JSON array per file of
// {question, correct_answer, distractor1..3, support}.
LoadResult adapt_sciq(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw std::runtime_error("sciq adapter expects a JSON array: " + path);
  LoadResult res;
  const Split split = split_from_path(fs::path(path));
  std::size_t idx = 0;
  for (const auto& rec : j) {
    ++idx;
    try {
      MCQInstance inst;
      inst.id = "sciq#" + std::to_string(idx - 1);
      inst.dataset = "sciq";
      inst.split = split;
      inst.article = rec.value("support", "");
      inst.question = rec.at("question").get<std::string>();
      inst.answer = rec.at("correct_answer").get<std::string>();
      for (const char* key : {"distractor1", "distractor2", "distractor3"})
        if (rec.contains(key)) inst.distractors.push_back(rec.at(key).get<std::string>());
      res.instances.push_back(std::move(inst));
    } catch (const std::exception& e) {
      res.errors.push_back({idx, "record " + std::to_string(idx) + ": " + e.what()});
    }
  }
  return res;
}

std::once_flag builtin_adapters_flag;

void ensure_builtin_adapters() {
  std::call_once(builtin_adapters_flag, [] {
    adapter_registry()["jsonl"] = adapt_jsonl;
    adapter_registry()["race"] = adapt_race;
    adapter_registry()["sciq"] = adapt_sciq;
  });
}

}  // namespace

void register_adapter(const std::string& name, AdapterFn fn) {
  ensure_builtin_adapters();
  adapter_registry()[name] = std::move(fn);
}

std::vector<std::string> registered_adapters() {
  ensure_builtin_adapters();
  std::vector<std::string> names;
  for (const auto& [name, _] : adapter_registry()) names.push_back(name);
  return names;
}

LoadResult load_dataset(const std::string& path, const std::string& adapter) {
  ensure_builtin_adapters();
  auto it = adapter_registry().find(adapter);
  if (it == adapter_registry().end()) throw std::invalid_argument("unknown adapter: " + adapter);
  if (!fs::exists(path)) throw std::runtime_error("dataset path does not exist: " + path);
  return it->second(path);
}

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

namespace {

std::string phrase_key(std::string_view s) {
  std::string t = text::normalize_match(s);
  std::size_t b = 0, e = t.size();
  while (b < e && text::is_punct_token(std::string_view(&t[b], 1))) ++b;
  while (e > b && text::is_punct_token(std::string_view(&t[e - 1], 1))) --e;
  return text::trim(t.substr(b, e - b));
}

}  // namespace

PreprocessResult preprocess(const std::vector<MCQInstance>& instances,
                            const PreprocessOptions& opts) {
  PreprocessResult res;
  std::vector<std::string> rejected;
  rejected.reserve(opts.rejected_answer_phrases.size());
  for (const auto& p : opts.rejected_answer_phrases) rejected.push_back(phrase_key(p));

  for (const auto& inst : instances) {
    const double th = opts.punct_corruption_threshold;
    if (text::is_corrupt(inst.article, th)) {
      res.dropped.push_back({inst.id, "corrupt_article"});
      continue;
    }
    if (text::is_corrupt(inst.question, th)) {
      res.dropped.push_back({inst.id, "corrupt_question"});
      continue;
    }
    if (text::is_corrupt(inst.answer, th)) {
      res.dropped.push_back({inst.id, "corrupt_answer"});
      continue;
    }
    const std::string akey = phrase_key(inst.answer);
    if (std::find(rejected.begin(), rejected.end(), akey) != rejected.end()) {
      res.dropped.push_back({inst.id, "none_of_the_above"});
      continue;
    }

    MCQInstance kept = inst;
    kept.distractors.clear();
    for (const auto& d : inst.distractors)
      if (!text::is_corrupt(d, th)) kept.distractors.push_back(d);

    if (kept.distractors.empty()) {
      res.dropped.push_back({inst.id, "no_distractors"});
      continue;
    }
    std::set<std::string> seen;
    bool redundant = false;
    for (const auto& d : kept.distractors)
      if (!seen.insert(text::normalize_match(d)).second) {
        redundant = true;
        break;
      }
    if (redundant) {
      res.dropped.push_back({inst.id, "redundant_distractors"});
      continue;
    }
    if (kept.distractors.size() > opts.max_distractors)
      kept.distractors.resize(opts.max_distractors);
    res.kept.push_back(std::move(kept));
  }
  return res;
}

std::pair<std::vector<MCQInstance>, std::vector<MCQInstance>> split_holdout(
    const std::vector<MCQInstance>& instances, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  for (const auto& inst : instances)
    if (inst.split != instances.front().split)
      throw std::invalid_argument("split_holdout expects instances from a single split");

  const std::size_t n = instances.size();
  const auto val_size = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<bool> is_val(n, false);
  for (std::size_t i = 0; i < val_size; ++i) is_val[order[i]] = true;

  std::vector<MCQInstance> train, validation;
  train.reserve(n - val_size);
  validation.reserve(val_size);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_val[i]) {
      MCQInstance v = instances[i];
      v.split = Split::validation;
      validation.push_back(std::move(v));
    } else {
      train.push_back(instances[i]);
    }
  }
  return {std::move(train), std::move(validation)};
}

std::vector<FlatInstance> flatten(const std::vector<MCQInstance>& instances) {
  std::vector<FlatInstance> out;
  for (const auto& inst : instances) {
    for (std::size_t i = 0; i < inst.distractors.size(); ++i) {
      FlatInstance flat;
      flat.id = inst.id + "#" + std::to_string(i);
      flat.parent_id = inst.id;
      flat.article = inst.article;
      flat.question = inst.question;
      flat.answer = inst.answer;
      flat.distractor = inst.distractors[i];
      flat.target = 1.0;
      flat.provenance = Provenance::gold;
      out.push_back(std::move(flat));
    }
  }
  return out;
}

CorpusStats stats(const std::vector<MCQInstance>& instances,
                  const std::vector<FlatInstance>& flats,
                  const std::vector<FlatInstance>& augmented) {
  CorpusStats s;
  std::map<std::string, Split> parent_split;
  for (const auto& inst : instances) {
    s.per_split[inst.split].instances++;
    parent_split[inst.id] = inst.split;
  }
  auto attribute = [&](const FlatInstance& f) -> Split {
    auto it = parent_split.find(f.parent_id);
    return it == parent_split.end() ? Split::train : it->second;
  };
  for (const auto& f : flats) s.per_split[attribute(f)].flattened++;
  for (const auto& f : augmented) s.per_split[attribute(f)].augmented++;
  return s;
}

// ---------------------------------------------------------------------------
// JSONL serialization
// ---------------------------------------------------------------------------

namespace {

json mcq_to_json(const MCQInstance& inst) {
  return json{{"id", inst.id},
              {"dataset", inst.dataset},
              {"split", to_string(inst.split)},
              {"article", inst.article},
              {"question", inst.question},
              {"answer", inst.answer},
              {"distractors", inst.distractors}};
}

json flat_to_json(const FlatInstance& f) {
  json j{{"id", f.id},
         {"parent_id", f.parent_id},
         {"article", f.article},
         {"question", f.question},
         {"answer", f.answer},
         {"distractor", f.distractor},
         {"target", f.target},
         {"provenance", to_string(f.provenance)}};
  if (f.fallback) j["fallback"] = *f.fallback;
  return j;
}

}  // namespace

void write_mcq_jsonl(const std::string& path, const std::vector<MCQInstance>& instances) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  for (const auto& inst : instances) out << mcq_to_json(inst).dump() << '\n';
}

void write_drop_report(const std::string& path, const std::vector<DropRecord>& drops) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  for (const auto& d : drops) out << json{{"id", d.id}, {"reason", d.reason}}.dump() << '\n';
}

void write_flat_jsonl(const std::string& path, const std::vector<FlatInstance>& rows,
                      const FlatFileMeta* meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  if (meta) {
    json m = json::object();
    for (const auto& [k, v] : meta->fields) m[k] = v;
    out << json{{"_meta", m}}.dump() << '\n';
  }
  for (const auto& r : rows) out << flat_to_json(r).dump() << '\n';
}

FlatLoadResult read_flat_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  FlatLoadResult res;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": invalid JSON");
    if (j.contains("_meta")) {
      FlatFileMeta meta;
      for (const auto& [k, v] : j["_meta"].items())
        meta.fields[k] = v.is_string() ? v.get<std::string>() : v.dump();
      res.meta = std::move(meta);
      continue;
    }
    FlatInstance f;
    f.id = j.at("id").get<std::string>();
    f.parent_id = j.value("parent_id", "");
    f.article = j.value("article", "");
    f.question = j.value("question", "");
    f.answer = j.value("answer", "");
    f.distractor = j.at("distractor").get<std::string>();
    f.target = j.at("target").get<double>();
    f.provenance = provenance_from_string(j.value("provenance", "gold"));
    if (j.contains("fallback")) f.fallback = j["fallback"].get<std::string>();
    res.rows.push_back(std::move(f));
  }
  return res;
}

}  // namespace disto
