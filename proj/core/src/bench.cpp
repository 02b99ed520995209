#include "disto/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "disto/text.hpp"

namespace fs = std::filesystem;

namespace disto {

double rating_value_from_string(const std::string& s) {
  const std::string w = text::lower(text::trim(s));
  if (w == "bad") return 0.0;
  if (w == "neutral") return 0.5;
  if (w == "good") return 1.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(w, &used);
    if (used == w.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("ratings: unknown rating value '" + s + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(text::trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

RatingsFile load_ratings_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ratings: cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ratings: empty file " + path);
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : {"instance_id", "distractor_index", "annotator", "rating"})
    if (!col.count(name))
      throw std::runtime_error("ratings: missing column '" + std::string(name) + "' in " + path);

  RatingsFile file;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
    Rating r;
    r.instance_id = fields[col["instance_id"]];
    r.distractor_index = std::stoi(fields[col["distractor_index"]]);
    r.annotator = fields[col["annotator"]];
    r.value = rating_value_from_string(fields[col["rating"]]);
    file.rows.push_back(std::move(r));
  }
  return file;
}

RatingsFile load_ratings_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ratings: cannot read " + path);
  RatingsFile file;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    Rating r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.distractor_index = j.at("distractor_index").get<int>();
    r.annotator = j.at("annotator").get<std::string>();
    if (j.at("rating").is_string())
      r.value = rating_value_from_string(j.at("rating").get<std::string>());
    else
      r.value = j.at("rating").get<double>();
    file.rows.push_back(std::move(r));
  }
  return file;
}

}  // namespace

RatingsFile RatingsFile::load(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".csv") return load_ratings_csv(path);
  if (ext == ".jsonl") return load_ratings_jsonl(path);
  throw std::invalid_argument("ratings: expected a .csv or .jsonl file, got " + path);
}

RatingsFile filter_raters(const RatingsFile& ratings, const RaterFilterOptions& options) {
  std::map<std::string, std::pair<int, int>> hits;  // annotator -> (correct, rated)
  for (const auto& r : ratings.rows) {
    const std::string key = r.instance_id + "#" + std::to_string(r.distractor_index);
    const auto it = options.calibration.find(key);
    if (it == options.calibration.end()) continue;
    auto& [correct, rated] = hits[r.annotator];
    ++rated;
    if (r.value == it->second) ++correct;
  }
  RatingsFile out;
  for (const auto& r : ratings.rows) {
    const auto it = hits.find(r.annotator);
    const bool keep = it == hits.end() ||
                      static_cast<double>(it->second.first) / it->second.second >=
                          options.min_accuracy;
    if (keep) out.rows.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// BLEU
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> bleu_tokens(const std::string& txt) {
  auto toks = text::tokenize(txt);
  for (auto& t : toks) t = text::lower(t);
  return toks;
}

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k) key += '\x1f';
      key += tokens[i + k];
    }
    counts[key]++;
  }
  return counts;
}

}  // namespace

double bleu_n(const std::vector<GeneratedSet>& sets, int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("bleu: order must be in 1..4");
  if (sets.empty()) throw std::invalid_argument("bleu: empty corpus");

  std::vector<long long> match(static_cast<std::size_t>(n), 0);
  std::vector<long long> total(static_cast<std::size_t>(n), 0);
  long long hyp_len = 0, ref_len = 0;

  for (const auto& set : sets) {
    if (!set.gold || set.gold->empty())
      throw std::invalid_argument("bleu: instance " + set.id + " has no gold references");
    std::vector<std::vector<std::string>> refs;
    refs.reserve(set.gold->size());
    for (const auto& g : *set.gold) refs.push_back(bleu_tokens(g));

    for (const auto& hyp_text : set.generated) {
      const auto hyp = bleu_tokens(hyp_text);
      hyp_len += static_cast<long long>(hyp.size());

      // effective reference length: closest to the hypothesis, shorter on ties
      long long best_ref = static_cast<long long>(refs[0].size());
      for (const auto& ref : refs) {
        const auto len = static_cast<long long>(ref.size());
        const auto d = std::llabs(len - static_cast<long long>(hyp.size()));
        const auto bd = std::llabs(best_ref - static_cast<long long>(hyp.size()));
        if (d < bd || (d == bd && len < best_ref)) best_ref = len;
      }
      ref_len += best_ref;

      for (int k = 1; k <= n; ++k) {
        const auto hyp_counts = count_ngrams(hyp, k);
        NgramCounts max_ref;
        for (const auto& ref : refs)
          for (const auto& [gram, c] : count_ngrams(ref, k))
            max_ref[gram] = std::max(max_ref[gram], c);
        long long clipped = 0, possible = 0;
        for (const auto& [gram, c] : hyp_counts) {
          possible += c;
          const auto it = max_ref.find(gram);
          if (it != max_ref.end()) clipped += std::min(c, it->second);
        }
        match[static_cast<std::size_t>(k - 1)] += clipped;
        total[static_cast<std::size_t>(k - 1)] += possible;
      }
    }
  }

  double log_prec = 0.0;
  for (int k = 0; k < n; ++k) {
    if (total[static_cast<std::size_t>(k)] == 0 || match[static_cast<std::size_t>(k)] == 0)
      return 0.0;
    log_prec += std::log(static_cast<double>(match[static_cast<std::size_t>(k)]) /
                         static_cast<double>(total[static_cast<std::size_t>(k)]));
  }
  log_prec /= n;

  if (hyp_len == 0) return 0.0;
  const double bp =
      hyp_len > ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return 100.0 * bp * std::exp(log_prec);
}

// ---------------------------------------------------------------------------
// Duplication rates
// ---------------------------------------------------------------------------

double ansdup(const std::vector<GeneratedSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("ansdup: empty corpus");
  long long matches = 0, pairs = 0;
  for (const auto& set : sets) {
    const std::string answer_key = text::exact_match_key(set.answer);
    for (const auto& d : set.generated) {
      ++pairs;
      if (text::exact_match_key(d) == answer_key) ++matches;
    }
  }
  return 100.0 * static_cast<double>(matches) / static_cast<double>(pairs);
}

double disdup(const std::vector<GeneratedSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("disdup: empty corpus");
  long long matches = 0, pairs = 0;
  for (const auto& set : sets) {
    if (set.generated.size() < 2)
      throw std::invalid_argument("disdup: instance " + set.id + " has fewer than 2 distractors");
    std::vector<std::string> keys;
    keys.reserve(set.generated.size());
    for (const auto& d : set.generated) keys.push_back(text::exact_match_key(d));
    for (std::size_t i = 0; i < keys.size(); ++i)
      for (std::size_t j = i + 1; j < keys.size(); ++j) {
        ++pairs;
        if (keys[i] == keys[j]) ++matches;
      }
  }
  return 100.0 * static_cast<double>(matches) / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// Agreement and correlation
// ---------------------------------------------------------------------------

double fleiss_kappa(const RatingsFile& ratings, bool allow_varying_raters) {
  if (ratings.rows.empty()) throw std::invalid_argument("fleiss: no ratings");

  std::map<std::string, int> categories;
  for (const auto& r : ratings.rows) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", r.value);
    categories.emplace(buf, 0);
  }
  int next = 0;
  for (auto& [_, idx] : categories) idx = next++;
  const int k = next;

  std::map<ItemKey, std::vector<int>> items;  // item -> counts per category
  std::set<std::pair<ItemKey, std::string>> seen;
  for (const auto& r : ratings.rows) {
    const ItemKey key{r.instance_id, r.distractor_index};
    if (!seen.emplace(key, r.annotator).second)
      throw std::invalid_argument("fleiss: annotator " + r.annotator + " rated " + r.instance_id +
                                  "#" + std::to_string(r.distractor_index) + " twice");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", r.value);
    auto& counts = items[key];
    counts.resize(static_cast<std::size_t>(k), 0);
    counts[static_cast<std::size_t>(categories.at(buf))]++;
  }

  std::size_t first_n = 0;
  double pbar = 0.0;
  std::vector<double> category_mass(static_cast<std::size_t>(k), 0.0);
  double total_ratings = 0.0;
  for (const auto& [key, counts] : items) {
    std::size_t ni = 0;
    for (int c : counts) ni += static_cast<std::size_t>(c);
    if (ni < 2)
      throw std::invalid_argument("fleiss: item " + key.first + "#" +
                                  std::to_string(key.second) + " has fewer than 2 ratings");
    if (first_n == 0) first_n = ni;
    if (!allow_varying_raters && ni != first_n)
      throw std::invalid_argument("fleiss: item " + key.first + "#" +
                                  std::to_string(key.second) +
                                  " has a different rater count; enable the tolerant mode");
    double agree = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      agree += static_cast<double>(counts[j]) * (counts[j] - 1);
      category_mass[j] += counts[j];
    }
    pbar += agree / (static_cast<double>(ni) * static_cast<double>(ni - 1));
    total_ratings += static_cast<double>(ni);
  }
  pbar /= static_cast<double>(items.size());

  double pe = 0.0;
  for (double mass : category_mass) {
    const double pj = mass / total_ratings;
    pe += pj * pj;
  }

  const double denom = 1.0 - pe;
  if (denom < 1e-15) return 1.0;  // a single category used everywhere
  return (pbar - pe) / denom;
}

PearsonResult correlate_with_ratings(const std::map<ItemKey, double>& scores,
                                     const RatingsFile& ratings) {
  std::map<ItemKey, std::pair<double, int>> sums;
  for (const auto& r : ratings.rows) {
    auto& [sum, count] = sums[{r.instance_id, r.distractor_index}];
    sum += r.value;
    ++count;
  }
  if (sums.size() != scores.size())
    throw std::invalid_argument("correlate: scores and ratings cover different item sets");
  std::vector<double> xs, ys;
  xs.reserve(scores.size());
  for (const auto& [key, score] : scores) {
    const auto it = sums.find(key);
    if (it == sums.end())
      throw std::invalid_argument("correlate: no ratings for item " + key.first + "#" +
                                  std::to_string(key.second));
    xs.push_back(score);
    ys.push_back(it->second.first / it->second.second);
  }
  return pearson(xs, ys);
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

namespace {

double run_external_adapter(const std::string& adapter, const std::vector<GeneratedSet>& sets,
                            const std::string& model) {
  static int counter = 0;
  const fs::path tmp = fs::temp_directory_path() /
                       ("disto_bench_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++) + ".jsonl");
  write_generated_jsonl(tmp.string(), sets);
  const std::string cmd = adapter + " " + tmp.string();
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    fs::remove(tmp);
    throw std::runtime_error("bench: cannot run external adapter: " + cmd);
  }
  std::string output;
  char buf[256];
  while (std::fgets(buf, sizeof(buf), pipe)) output += buf;
  const int status = ::pclose(pipe);
  fs::remove(tmp);
  if (status != 0)
    throw std::runtime_error("bench: external adapter failed on model " + model + ": " + cmd);
  const std::string trimmed = text::trim(output);
  try {
    const auto j = nlohmann::json::parse(trimmed);
    if (j.is_object()) return j.at("score").get<double>();
    if (j.is_number()) return j.get<double>();
  } catch (const nlohmann::json::parse_error&) {
  }
  try {
    return std::stod(trimmed);
  } catch (const std::exception&) {
    throw std::runtime_error("bench: cannot parse adapter output '" + trimmed + "'");
  }
}

std::vector<std::string> rank_models(const std::vector<ModelRow>& rows,
                                     double (*value)(const ModelRow&), bool higher_better) {
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_better ? value(rows[a]) > value(rows[b]) : value(rows[a]) < value(rows[b]);
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(rows[i].model);
  return out;
}

}  // namespace

BenchReport build_report(
    const std::vector<std::pair<std::string, std::vector<GeneratedSet>>>& models,
    const ScorerCheckpoint& checkpoint, const BenchOptions& options) {
  if (models.empty()) throw std::invalid_argument("bench: no models");

  std::set<std::string> universe;
  for (const auto& set : models.front().second) universe.insert(set.id);
  for (const auto& [model, sets] : models) {
    std::set<std::string> ids;
    for (const auto& set : sets) ids.insert(set.id);
    if (ids != universe)
      throw std::invalid_argument("bench: model " + model +
                                  " covers a different instance-id universe");
  }

  BenchReport report;
  report.external_name = options.external_name;
  for (const auto& [model, sets] : models) {
    ModelRow row;
    row.model = model;
    for (int n = 1; n <= 4; ++n) row.bleu[static_cast<std::size_t>(n - 1)] = bleu_n(sets, n);
    row.disto = score_corpus(sets, checkpoint).aggregate;
    row.ansdup = ansdup(sets);
    row.disdup = disdup(sets);
    if (options.external_adapter)
      row.external = run_external_adapter(*options.external_adapter, sets, model);
    report.rows.push_back(std::move(row));
  }

  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(checkpoint.fingerprint()));
  report.checkpoint_fingerprint = buf;

  report.rankings["bleu1"] = rank_models(report.rows, [](const ModelRow& r) { return r.bleu[0]; }, true);
  report.rankings["bleu2"] = rank_models(report.rows, [](const ModelRow& r) { return r.bleu[1]; }, true);
  report.rankings["bleu3"] = rank_models(report.rows, [](const ModelRow& r) { return r.bleu[2]; }, true);
  report.rankings["bleu4"] = rank_models(report.rows, [](const ModelRow& r) { return r.bleu[3]; }, true);
  report.rankings["disto"] = rank_models(report.rows, [](const ModelRow& r) { return r.disto; }, true);
  report.rankings["ansdup"] =
      rank_models(report.rows, [](const ModelRow& r) { return r.ansdup; }, false);
  report.rankings["disdup"] =
      rank_models(report.rows, [](const ModelRow& r) { return r.disdup; }, false);
  if (options.external_adapter)
    report.rankings[options.external_name] =
        rank_models(report.rows, [](const ModelRow& r) { return r.external.value_or(0.0); }, true);

  const auto& disto_rank = report.rankings["disto"];
  for (const char* col : {"bleu1", "bleu2", "bleu3", "bleu4"})
    if (report.rankings[col] != disto_rank) report.rank_disagreement = true;

  return report;
}

std::string BenchReport::to_json() const {
  nlohmann::json j;
  j["checkpoint_fingerprint"] = checkpoint_fingerprint;
  j["rank_disagreement"] = rank_disagreement;
  j["lower_is_better"] = {"ansdup", "disdup"};
  j["rankings"] = rankings;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r{{"model", row.model}, {"bleu1", row.bleu[0]}, {"bleu2", row.bleu[1]},
                     {"bleu3", row.bleu[2]}, {"bleu4", row.bleu[3]}, {"disto", row.disto},
                     {"ansdup", row.ansdup}, {"disdup", row.disdup}};
    if (row.external) r[external_name] = *row.external;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string BenchReport::render() const {
  std::ostringstream out;
  out << "Model            BLEU-1  BLEU-2  BLEU-3  BLEU-4   DISTO  AnsDup  DisDup";
  const bool has_external = !rows.empty() && rows.front().external.has_value();
  if (has_external) out << "  " << external_name;
  out << "\n";
  for (const auto& row : rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-15s %7.2f %7.2f %7.2f %7.2f %7.2f %7.2f %7.2f",
                  row.model.c_str(), row.bleu[0], row.bleu[1], row.bleu[2], row.bleu[3],
                  row.disto, row.ansdup, row.disdup);
    out << line;
    if (row.external) {
      std::snprintf(line, sizeof(line), " %9.2f", *row.external);
      out << line;
    }
    out << "\n";
  }
  out << "(lower is better for AnsDup and DisDup)\n";
  if (rank_disagreement)
    out << "note: BLEU and DISTO rank the models differently\n";
  return out.str();
}

}  // namespace disto
