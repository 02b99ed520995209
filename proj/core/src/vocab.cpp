#include "disto/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "disto/text.hpp"

namespace disto {

namespace {
const std::vector<std::string>& special_tokens() {
  static const std::vector<std::string> s{"[PAD]", "[UNK]", "[CLS]", "[QUES]",
                                          "[ANS]", "[DIS]", "[ART]"};
  return s;
}
}  // namespace

Vocabulary::Vocabulary() {
  for (const auto& tok : special_tokens()) {
    index_.emplace(tok, static_cast<int>(tokens_.size()));
    tokens_.push_back(tok);
  }
}

Vocabulary Vocabulary::build(const std::vector<std::string>& texts, std::size_t cap) {
  Vocabulary v;
  if (cap < v.tokens_.size()) throw std::invalid_argument("vocabulary: cap below special count");
  std::map<std::string, std::size_t> freq;
  for (const auto& txt : texts)
    for (const auto& tok : text::tokenize(txt)) {
      const std::string w = text::lower(tok);
      if (!v.index_.count(w)) freq[w]++;
    }
  std::vector<std::pair<std::string, std::size_t>> items(freq.begin(), freq.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [word, _] : items) {
    if (v.tokens_.size() >= cap) break;
    v.index_.emplace(word, static_cast<int>(v.tokens_.size()));
    v.tokens_.push_back(word);
  }
  return v;
}

bool Vocabulary::is_special(const std::string& token) const {
  const auto& s = special_tokens();
  return std::find(s.begin(), s.end(), token) != s.end();
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  it = index_.find(text::lower(token));
  return it != index_.end() ? it->second : unk_id;
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens,
                                    bool prepend_cls) const {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 1);
  if (prepend_cls) ids.push_back(cls_id);
  for (const auto& tok : tokens) ids.push_back(id_of(tok));
  return ids;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("vocabulary: cannot write " + path);
  for (const auto& tok : tokens_) out << tok << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("vocabulary: cannot read " + path);
  Vocabulary v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (lineno < v.tokens_.size()) {
      if (line != v.tokens_[lineno])
        throw std::runtime_error("vocabulary: special token mismatch in " + path);
    } else {
      v.index_.emplace(line, static_cast<int>(v.tokens_.size()));
      v.tokens_.push_back(line);
    }
    lineno++;
  }
  if (lineno < special_tokens().size())
    throw std::runtime_error("vocabulary: truncated file " + path);
  return v;
}

}  // namespace disto
