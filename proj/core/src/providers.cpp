#include "disto/providers.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>
#include <unordered_map>

#include "disto/rng.hpp"
#include "disto/text.hpp"

namespace disto {

std::map<std::string, std::string> ProviderSuite::identities() const {
  std::map<std::string, std::string> ids;
  if (embedding) ids["embedding"] = embedding->identity();
  if (pos) ids["pos"] = pos->identity();
  if (ne) ids["ne"] = ne->identity();
  if (filler) ids["filler"] = filler->identity();
  return ids;
}

// ---------------------------------------------------------------------------
// Hashed embeddings
// ---------------------------------------------------------------------------

namespace {

class HashEmbedding final : public EmbeddingProvider {
 public:
  explicit HashEmbedding(int dim) : dim_(dim) {}

  Eigen::VectorXf embed(const std::string& txt) const override {
    Eigen::VectorXf acc = Eigen::VectorXf::Zero(dim_);
    const auto tokens = text::tokenize(txt);
    for (const auto& tok : tokens) {
      if (text::is_punct_token(tok)) continue;
      const std::string w = text::lower(tok);
      acc += token_vec("tok:" + w);
      // character trigrams give related surface forms nearby vectors
      const std::string padded = "^" + w + "$";
      for (std::size_t i = 0; i + 3 <= padded.size(); ++i)
        acc += 0.25f * token_vec("tri:" + padded.substr(i, 3));
    }
    const float norm = acc.norm();
    if (norm > 0.0f) acc /= norm;
    return acc;
  }

  int dim() const override { return dim_; }
  std::string identity() const override { return "hash-embed-" + std::to_string(dim_) + "/v1"; }

 private:
  Eigen::VectorXf token_vec(const std::string& key) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    Rng rng(text::fnv1a64(key));
    Eigen::VectorXf v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = static_cast<float>(rng.gaussian());
    v /= std::sqrt(static_cast<float>(dim_));
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(v)).first->second;
  }

  int dim_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Eigen::VectorXf> cache_;
};

// ---------------------------------------------------------------------------
// Rule POS tagger
// ---------------------------------------------------------------------------

const std::set<std::string>& det_words() {
  static const std::set<std::string> s{"the",  "a",     "an",    "this", "that",    "these",
                                       "those", "each",  "every", "some", "any",     "no",
                                       "all",   "both",  "either", "neither", "another", "such"};
  return s;
}

const std::set<std::string>& pron_words() {
  static const std::set<std::string> s{
      "i",    "you",   "he",     "she",    "it",     "we",      "they",   "me",        "him",
      "her",  "us",    "them",   "my",     "your",   "his",     "its",    "our",       "their",
      "mine", "yours", "hers",   "ours",   "theirs", "himself", "herself", "itself",
      "themselves", "myself", "yourself", "ourselves", "who", "whom", "whose", "which",
      "what", "someone", "anyone", "everyone", "nobody", "something", "anything", "everything"};
  return s;
}

const std::set<std::string>& adp_words() {
  static const std::set<std::string> s{
      "of",   "in",     "on",      "at",     "by",      "for",    "with",   "from",  "to",
      "into", "onto",   "over",    "under",  "between", "among",  "through", "during",
      "against", "about", "across", "behind", "beyond",  "near",  "without", "within",
      "along", "around", "off",    "upon",   "toward",  "towards", "inside", "outside"};
  return s;
}

const std::set<std::string>& aux_words() {
  static const std::set<std::string> s{"am",   "is",   "are",   "was",    "were", "be",
                                       "been", "being", "do",    "does",   "did",  "have",
                                       "has",  "had",  "will",  "would",  "can",  "could",
                                       "shall", "should", "may", "might", "must"};
  return s;
}

const std::set<std::string>& conj_words() {
  static const std::set<std::string> s{"and", "or",   "but",      "nor",   "so",   "yet",
                                       "because", "although", "while", "if", "when", "since",
                                       "unless", "whereas", "than", "as"};
  return s;
}

const std::set<std::string>& adv_words() {
  static const std::set<std::string> s{"very", "too",  "quite", "never",  "always", "often",
                                       "sometimes", "here", "there", "now", "then", "soon",
                                       "already", "just", "still", "also", "maybe", "perhaps",
                                       "not", "again", "away", "up", "down", "out"};
  return s;
}

const std::set<std::string>& irregular_verbs() {
  static const std::set<std::string> s{
      "sat",   "ran",   "went",  "ate",    "said",  "made",  "took",  "came",   "saw",
      "got",   "gave",  "found", "told",   "left",  "felt",  "kept",  "began",  "brought",
      "wrote", "stood", "heard", "let",    "meant", "met",   "paid",  "read",   "sit",
      "sits",  "run",   "runs",  "go",     "goes",  "eat",   "eats",  "focus",  "drew",
      "draw",  "drank", "sang",  "swam",   "threw", "flew",  "grew",  "knew",   "blew",
      "chose", "spoke", "broke", "drove",  "rode",  "rose",  "wore",  "won",    "lost",
      "built", "fell",  "fought", "fed",   "forgot", "froze", "hid",  "held",   "hurt",
      "laid",  "led",   "lit",   "slept",  "spent", "taught", "thought", "woke", "say",
      "says",  "see",   "sees",  "make",   "makes", "take",  "takes", "get",    "gets",
      "give",  "gives", "know",  "knows",  "think", "thinks", "come", "comes",  "want",
      "wants", "use",   "uses",  "work",   "works", "call",  "calls", "tell",   "tells",
      "ask",   "asks",  "seem",  "seems",  "feel",  "feels", "try",   "tries",  "leave",
      "leaves", "put",  "puts",  "keep",   "keeps", "live",  "lives", "begin",  "begins",
      "write", "writes", "show", "shows",  "play",  "plays", "move",  "moves",  "like",
      "likes", "hold",  "holds", "bring",  "brings", "turn", "turns", "help",   "helps"};
  return s;
}

bool ends_with(const std::string& w, const char* suf) {
  const std::size_t n = std::char_traits<char>::length(suf);
  return w.size() >= n && w.compare(w.size() - n, n, suf) == 0;
}

bool is_numeric_token(const std::string& w) {
  bool digit = false;
  for (char c : w) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isdigit(u)) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '%' && c != '-') {
      return false;
    }
  }
  return digit;
}

class RulePosTagger final : public PosTagger {
 public:
  std::vector<std::string> tag(const std::vector<std::string>& tokens) const override {
    std::vector<std::string> tags;
    tags.reserve(tokens.size());
    bool sentence_start = true;
    for (const auto& tok : tokens) {
      tags.push_back(tag_one(tok, sentence_start));
      sentence_start = tok == "." || tok == "!" || tok == "?";
    }
    return tags;
  }

  std::string identity() const override { return "rule-pos/v1"; }

 private:
  static std::string tag_one(const std::string& tok, bool sentence_start) {
    if (text::is_punct_token(tok)) return "PUNCT";
    if (is_numeric_token(tok)) return "NUM";
    const std::string w = text::lower(tok);
    if (det_words().count(w)) return "DET";
    if (pron_words().count(w)) return "PRON";
    if (adp_words().count(w)) return "ADP";
    if (aux_words().count(w)) return "AUX";
    if (conj_words().count(w)) return "CONJ";
    if (adv_words().count(w)) return "ADV";
    if (irregular_verbs().count(w)) return "VERB";
    if (w.size() > 3) {
      if (ends_with(w, "ly")) return "ADV";
      if (ends_with(w, "ing") || ends_with(w, "ed") || ends_with(w, "ize") || ends_with(w, "ise"))
        return "VERB";
      if (ends_with(w, "tion") || ends_with(w, "sion") || ends_with(w, "ment") ||
          ends_with(w, "ness") || ends_with(w, "ship") || ends_with(w, "hood") ||
          ends_with(w, "ism") || ends_with(w, "ity") || ends_with(w, "ance") ||
          ends_with(w, "ence"))
        return "NOUN";
      if (ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "ive") ||
          ends_with(w, "able") || ends_with(w, "ible") || ends_with(w, "ic") ||
          ends_with(w, "ish") || ends_with(w, "less"))
        return "ADJ";
    }
    if (!sentence_start && !tok.empty() && std::isupper(static_cast<unsigned char>(tok[0])))
      return "PROPN";
    return "NOUN";
  }
};

bool content_tag(const std::string& tag) {
  return tag == "NOUN" || tag == "PROPN" || tag == "VERB" || tag == "ADJ";
}

// ---------------------------------------------------------------------------
// Pattern NE tagger
// ---------------------------------------------------------------------------

const std::set<std::string>& month_day_words() {
  static const std::set<std::string> s{
      "january", "february", "march",    "april",   "may",      "june",     "july",
      "august",  "september", "october", "november", "december", "monday",  "tuesday",
      "wednesday", "thursday", "friday", "saturday", "sunday"};
  return s;
}

const std::set<std::string>& person_gazetteer() {
  static const std::set<std::string> s{"john", "mary", "james", "alice", "bob",    "tom",
                                       "jack", "anna", "david", "sarah", "michael", "emma",
                                       "peter", "lucy", "henry", "jane",  "benny",  "buck"};
  return s;
}

const std::set<std::string>& location_gazetteer() {
  static const std::set<std::string> s{"paris",  "london", "america", "england", "france",
                                       "china",  "japan",  "york",    "boston",  "texas",
                                       "europe", "africa", "asia",    "canada",  "india"};
  return s;
}

const std::set<std::string>& org_keywords() {
  static const std::set<std::string> s{"inc", "corp", "ltd", "university", "company",
                                       "school", "club", "institute", "college"};
  return s;
}

const std::set<std::string>& honorifics() {
  static const std::set<std::string> s{"mr", "mrs", "ms", "dr", "prof"};
  return s;
}

bool is_year(const std::string& w) {
  if (w.size() != 4) return false;
  for (char c : w)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return w[0] == '1' || w[0] == '2';
}

class PatternNeTagger final : public NeTagger {
 public:
  std::vector<std::string> entity_types(const std::string& txt) const override {
    const auto tokens = text::tokenize(txt);
    std::vector<std::string> per_token(tokens.size());
    bool sentence_start = true;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      per_token[i] = type_of(tokens, i, sentence_start);
      sentence_start = tokens[i] == "." || tokens[i] == "!" || tokens[i] == "?";
    }
    // collapse runs of the same type into single entities
    std::vector<std::string> out;
    for (std::size_t i = 0; i < per_token.size(); ++i) {
      if (per_token[i].empty()) continue;
      if (i > 0 && per_token[i - 1] == per_token[i]) continue;
      out.push_back(per_token[i]);
    }
    return out;
  }

  std::string identity() const override { return "pattern-ne/v1"; }

 private:
  static std::string type_of(const std::vector<std::string>& toks, std::size_t i,
                             bool sentence_start) {
    const std::string& tok = toks[i];
    if (text::is_punct_token(tok)) return {};
    const std::string w = text::lower(tok);
    if (month_day_words().count(w) || is_year(w)) return "DATE";
    if (is_numeric_token(w)) return "NUMBER";
    const bool capitalized = !tok.empty() && std::isupper(static_cast<unsigned char>(tok[0]));
    if (person_gazetteer().count(w)) return "PERSON";
    if (location_gazetteer().count(w)) return "LOCATION";
    if (capitalized) {
      if (i > 0 && honorifics().count(text::lower(toks[i - 1]))) return "PERSON";
      if (org_keywords().count(w)) return "ORGANIZATION";
      if (i + 1 < toks.size() && org_keywords().count(text::lower(toks[i + 1])))
        return "ORGANIZATION";
      if (!sentence_start) return "MISC";
    }
    return {};
  }
};

// ---------------------------------------------------------------------------
// POS-lexicon mask filler
// ---------------------------------------------------------------------------

class PosLexiconFiller final : public MaskFiller {
 public:
  PosLexiconFiller(const std::vector<std::string>& pool_texts,
                   std::shared_ptr<const PosTagger> tagger)
      : tagger_(std::move(tagger)) {
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    for (const auto& txt : pool_texts) {
      const auto toks = text::tokenize(txt);
      const auto tags = tagger_->tag(toks);
      for (std::size_t i = 0; i < toks.size(); ++i)
        if (content_tag(tags[i])) counts[tags[i]][text::lower(toks[i])]++;
    }
    for (auto& [tag, freq] : counts) {
      std::vector<std::pair<std::string, std::size_t>> items(freq.begin(), freq.end());
      std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      auto& lex = lexicon_[tag];
      lex.reserve(items.size());
      for (auto& [word, _] : items) lex.push_back(word);
      std::uint64_t tag_hash = text::fnv1a64(tag);
      for (const auto& word : lex)
        tag_hash = (tag_hash ^ text::fnv1a64(word)) * 1099511628211ull;
      fingerprint_ ^= tag_hash;
    }
  }

  std::vector<std::string> fill(const std::vector<std::string>& tokens, std::size_t position,
                                std::size_t top_n) const override {
    if (position >= tokens.size()) return {};
    const auto tags = tagger_->tag(tokens);
    const auto it = lexicon_.find(tags[position]);
    if (it == lexicon_.end()) return {};
    const std::string original = text::lower(tokens[position]);
    std::vector<std::string> out;
    for (const auto& cand : it->second) {
      if (out.size() >= top_n) break;
      if (cand == original) continue;
      out.push_back(cand);
    }
    return out;
  }

  std::string identity() const override {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fingerprint_));
    return std::string("pos-lexicon-filler/v1:") + buf;
  }

 private:
  std::shared_ptr<const PosTagger> tagger_;
  std::map<std::string, std::vector<std::string>> lexicon_;
  std::uint64_t fingerprint_ = 0xcbf29ce484222325ull;
};

}  // namespace

bool is_content_tag(const std::string& tag) { return content_tag(tag); }

std::shared_ptr<const EmbeddingProvider> make_hash_embedding(int dim) {
  return std::make_shared<HashEmbedding>(dim);
}

std::shared_ptr<const PosTagger> make_rule_pos_tagger() {
  return std::make_shared<RulePosTagger>();
}

std::shared_ptr<const NeTagger> make_pattern_ne_tagger() {
  return std::make_shared<PatternNeTagger>();
}

std::shared_ptr<const MaskFiller> make_pos_lexicon_filler(
    const std::vector<std::string>& pool_texts, std::shared_ptr<const PosTagger> tagger) {
  return std::make_shared<PosLexiconFiller>(pool_texts, std::move(tagger));
}

ProviderSuite make_builtin_providers(int embed_dim) {
  ProviderSuite suite;
  suite.embedding = make_hash_embedding(embed_dim);
  suite.pos = make_rule_pos_tagger();
  suite.ne = make_pattern_ne_tagger();
  return suite;
}

}  // namespace disto
