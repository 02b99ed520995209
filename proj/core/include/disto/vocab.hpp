#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace disto {

// Word-level vocabulary over lowercased tokens, with reserved special ids.
class Vocabulary {
 public:
  static constexpr int pad_id = 0;
  static constexpr int unk_id = 1;
  static constexpr int cls_id = 2;

  Vocabulary();

  // Most frequent tokens across the texts, ties resolved lexicographically.
  static Vocabulary build(const std::vector<std::string>& texts, std::size_t cap = 8192);

  int id_of(const std::string& token) const;
  bool is_special(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Token ids, optionally led by [CLS].
  std::vector<int> encode(const std::vector<std::string>& tokens, bool prepend_cls) const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace disto
