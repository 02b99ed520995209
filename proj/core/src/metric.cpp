#include "disto/metric.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "disto/text.hpp"

namespace disto {

std::vector<GeneratedSet> read_generated_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("generated: cannot read " + path);
  std::vector<GeneratedSet> sets;
  std::set<std::string> seen;
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
    GeneratedSet set;
    set.id = j.at("id").get<std::string>();
    set.question = j.at("question").get<std::string>();
    set.answer = j.at("answer").get<std::string>();
    set.article = j.at("article").get<std::string>();
    set.generated = j.at("generated").get<std::vector<std::string>>();
    if (j.contains("gold")) set.gold = j.at("gold").get<std::vector<std::string>>();
    if (set.generated.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": no generated distractors");
    if (!seen.insert(set.id).second)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate id " + set.id);
    sets.push_back(std::move(set));
  }
  return sets;
}

void write_generated_jsonl(const std::string& path, const std::vector<GeneratedSet>& sets) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("generated: cannot write " + path);
  for (const auto& set : sets) {
    nlohmann::json j{{"id", set.id},
                     {"question", set.question},
                     {"answer", set.answer},
                     {"article", set.article},
                     {"generated", set.generated}};
    if (set.gold) j["gold"] = *set.gold;
    out << j.dump() << "\n";
  }
}

double score_distractor(const std::string& question, const std::string& answer,
                        const std::string& distractor, const std::string& article,
                        const ScorerCheckpoint& checkpoint) {
  if (text::trim(distractor).empty())
    throw std::invalid_argument("score_distractor: empty distractor");
  ContextBundle bundle;
  bundle.question = question;
  bundle.answer = answer;
  bundle.distractor = distractor;
  bundle.article = article;
  return checkpoint.score(bundle);
}

double score_instance(const GeneratedSet& set, const ScorerCheckpoint& checkpoint) {
  if (set.generated.empty())
    throw std::invalid_argument("score_instance: no distractors in " + set.id);
  double sum = 0.0;
  for (const auto& d : set.generated)
    sum += score_distractor(set.question, set.answer, d, set.article, checkpoint);
  return sum / static_cast<double>(set.generated.size());
}

ScoreReport score_corpus(const std::vector<GeneratedSet>& sets,
                         const ScorerCheckpoint& checkpoint) {
  if (sets.empty()) throw std::invalid_argument("score_corpus: empty corpus");
  ScoreReport report;
  report.instances.reserve(sets.size());
  double total = 0.0;
  for (const auto& set : sets) {
    InstanceScore inst;
    inst.id = set.id;
    inst.per_distractor.reserve(set.generated.size());
    double sum = 0.0;
    for (const auto& d : set.generated) {
      const double s = score_distractor(set.question, set.answer, d, set.article, checkpoint);
      inst.per_distractor.push_back(s);
      sum += s;
    }
    inst.mean = sum / static_cast<double>(set.generated.size());
    total += inst.mean;
    report.instances.push_back(std::move(inst));
  }
  report.aggregate = 100.0 * total / static_cast<double>(sets.size());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(checkpoint.fingerprint()));
  report.checkpoint_fingerprint = buf;
  return report;
}

std::string ScoreReport::to_json() const {
  nlohmann::json j;
  j["aggregate"] = aggregate;
  j["checkpoint_fingerprint"] = checkpoint_fingerprint;
  j["instances"] = nlohmann::json::array();
  for (const auto& inst : instances)
    j["instances"].push_back(
        {{"id", inst.id}, {"mean", inst.mean}, {"scores", inst.per_distractor}});
  return j.dump(2) + "\n";
}

}  // namespace disto
