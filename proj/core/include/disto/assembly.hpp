#pragma once

#include <string>
#include <utility>
#include <vector>

#include "disto/corpus.hpp"
#include "disto/vocab.hpp"

namespace disto {

// Which context fields take part in input assembly. The distractor always does.
struct AblationMask {
  bool question = true;
  bool answer = true;
  bool article = true;

  bool full() const { return question && answer && article; }
};

struct ContextBundle {
  std::string question;
  std::string answer;
  std::string distractor;
  std::string article;
  AblationMask mask;
};

ContextBundle bundle_from(const FlatInstance& flat, AblationMask mask = {});

struct AssembledInput {
  std::vector<std::string> tokens;  // markers and word tokens, within budget
  std::string text;                 // tokens joined by single spaces
  std::vector<int> ids;             // [CLS] + token ids when a vocabulary is set
};

// Lays out "[QUES] q [ANS] a [DIS] d [ART] ar" (and the two-branch split)
// within a fixed encoder budget. The article absorbs all truncation; its tail
// is cut so that one summary position plus the tokens fit max_len.
class Assembler {
 public:
  explicit Assembler(int max_len = 512, const Vocabulary* vocab = nullptr);

  AssembledInput sept(const ContextBundle& bundle) const;
  std::pair<AssembledInput, AssembledInput> siamese(const ContextBundle& bundle) const;

  int max_len() const { return max_len_; }

 private:
  AssembledInput finalize(std::vector<std::string> head, const std::string* article) const;

  int max_len_;
  const Vocabulary* vocab_;
};

}  // namespace disto
