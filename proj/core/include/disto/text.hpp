#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace disto::text {

std::string trim(std::string_view s);
std::string lower(std::string_view s);

// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_ws(std::string_view s);

// Canonical form used for dedup / redundancy / equality-of-distractor
// checks: lowercase + collapsed whitespace.
std::string normalize_match(std::string_view s);

// Fraction of non-whitespace bytes that are ASCII punctuation. Bytes in
// multi-byte UTF-8 sequences count as non-punctuation.
double punct_ratio(std::string_view s);

// True when the text is empty after trimming or is mostly punctuation
// (ratio >= threshold).
bool is_corrupt(std::string_view s, double threshold = 0.9);

// Word tokenizer: splits on whitespace, then peels leading/trailing
// punctuation into their own tokens. Internal apostrophes and hyphens
// stay inside the word ("don't", "well-known").
std::vector<std::string> tokenize(std::string_view s);

// Inverse of tokenize up to spacing: joins with single spaces but
// attaches closing punctuation to the previous token.
std::string detokenize(const std::vector<std::string>& tokens);

std::size_t token_count(std::string_view s);

// Unicode NFC (canonical composition), via ICU.
std::string nfc(std::string_view s);

// Exact-match normalization used by AnsDup/DisDup: NFC + outer
// whitespace strip. Deliberately no case folding.
std::string exact_match_key(std::string_view s);

bool is_punct_token(std::string_view tok);

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace disto::text
