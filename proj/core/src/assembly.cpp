#include "disto/assembly.hpp"

#include <stdexcept>

#include "disto/text.hpp"

namespace disto {

ContextBundle bundle_from(const FlatInstance& flat, AblationMask mask) {
  ContextBundle b;
  b.question = flat.question;
  b.answer = flat.answer;
  b.distractor = flat.distractor;
  b.article = flat.article;
  b.mask = mask;
  return b;
}

Assembler::Assembler(int max_len, const Vocabulary* vocab) : max_len_(max_len), vocab_(vocab) {
  if (max_len_ < 8) throw std::invalid_argument("assembler: max_len too small");
}

AssembledInput Assembler::finalize(std::vector<std::string> head,
                                   const std::string* article) const {
  const std::size_t budget = static_cast<std::size_t>(max_len_) - 1;  // summary slot
  if (article && head.size() + 1 <= budget) {
    head.push_back("[ART]");
    const std::size_t room = budget - head.size();
    const auto art_tokens = text::tokenize(*article);
    for (std::size_t i = 0; i < art_tokens.size() && i < room; ++i)
      head.push_back(art_tokens[i]);
  }
  if (head.size() > budget) head.resize(budget);

  AssembledInput out;
  out.text.reserve(head.size() * 8);
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (i) out.text += ' ';
    out.text += head[i];
  }
  out.tokens = std::move(head);
  if (vocab_) out.ids = vocab_->encode(out.tokens, /*prepend_cls=*/true);
  return out;
}

AssembledInput Assembler::sept(const ContextBundle& bundle) const {
  std::vector<std::string> head;
  if (bundle.mask.question) {
    head.push_back("[QUES]");
    for (auto& tok : text::tokenize(bundle.question)) head.push_back(std::move(tok));
  }
  if (bundle.mask.answer) {
    head.push_back("[ANS]");
    for (auto& tok : text::tokenize(bundle.answer)) head.push_back(std::move(tok));
  }
  head.push_back("[DIS]");
  for (auto& tok : text::tokenize(bundle.distractor)) head.push_back(std::move(tok));
  return finalize(std::move(head), bundle.mask.article ? &bundle.article : nullptr);
}

std::pair<AssembledInput, AssembledInput> Assembler::siamese(const ContextBundle& bundle) const {
  std::vector<std::string> ctx;
  if (bundle.mask.question) {
    ctx.push_back("[QUES]");
    for (auto& tok : text::tokenize(bundle.question)) ctx.push_back(std::move(tok));
  }
  if (bundle.mask.answer) {
    ctx.push_back("[ANS]");
    for (auto& tok : text::tokenize(bundle.answer)) ctx.push_back(std::move(tok));
  }
  AssembledInput context_branch =
      finalize(std::move(ctx), bundle.mask.article ? &bundle.article : nullptr);

  std::vector<std::string> dis;
  dis.push_back("[DIS]");
  for (auto& tok : text::tokenize(bundle.distractor)) dis.push_back(std::move(tok));
  AssembledInput distractor_branch = finalize(std::move(dis), nullptr);

  return {std::move(context_branch), std::move(distractor_branch)};
}

}  // namespace disto
