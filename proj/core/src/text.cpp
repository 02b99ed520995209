#include "disto/text.hpp"

#include <unicode/unorm2.h>
#include <unicode/ustring.h>

#include <cctype>
#include <stdexcept>

namespace disto::text {

namespace {
inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }
inline bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }
}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = true;  // leading whitespace dropped
  for (char c : s) {
    if (is_space(static_cast<unsigned char>(c))) {
      if (!in_ws) out.push_back(' ');
      in_ws = true;
    } else {
      out.push_back(c);
      in_ws = false;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string normalize_match(std::string_view s) { return lower(collapse_ws(s)); }

double punct_ratio(std::string_view s) {
  std::size_t punct = 0, total = 0;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (is_space(u)) continue;
    ++total;
    if (is_ascii_punct(u)) ++punct;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(punct) / static_cast<double>(total);
}

bool is_corrupt(std::string_view s, double threshold) {
  const std::string t = trim(s);
  if (t.empty()) return true;
  return punct_ratio(t) >= threshold;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    while (i < n && is_space(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !is_space(static_cast<unsigned char>(s[j]))) ++j;
    std::string_view word = s.substr(i, j - i);
    i = j;

    // peel leading punctuation
    std::size_t b = 0;
    while (b < word.size() && is_ascii_punct(static_cast<unsigned char>(word[b]))) {
      out.emplace_back(1, word[b]);
      ++b;
    }
    // find trailing punctuation
    std::size_t e = word.size();
    while (e > b && is_ascii_punct(static_cast<unsigned char>(word[e - 1]))) --e;
    // keep apostrophes/hyphens interior; a word that is entirely punctuation
    // was consumed by the leading loop already
    if (e > b) out.emplace_back(word.substr(b, e - b));
    for (std::size_t k = e; k < word.size(); ++k) out.emplace_back(1, word[k]);
  }
  return out;
}

bool is_punct_token(std::string_view tok) {
  if (tok.empty()) return false;
  for (char c : tok)
    if (!is_ascii_punct(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  static const std::string_view no_space_before = ".,;:!?)]}'\"";
  static const std::string_view no_space_after = "([{";
  std::string out;
  bool suppress_space = false;
  for (const auto& tok : tokens) {
    bool closing = tok.size() == 1 && no_space_before.find(tok[0]) != std::string_view::npos;
    if (!out.empty() && !closing && !suppress_space) out.push_back(' ');
    out += tok;
    suppress_space = tok.size() == 1 && no_space_after.find(tok[0]) != std::string_view::npos;
  }
  return out;
}

std::size_t token_count(std::string_view s) { return tokenize(s).size(); }

std::string nfc(std::string_view s) {
  if (s.empty()) return {};
  UErrorCode ec = U_ZERO_ERROR;
  const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
  if (U_FAILURE(ec)) throw std::runtime_error("ICU NFC instance unavailable");

  std::vector<UChar> u16(s.size() + 1);
  int32_t u16len = 0;
  u_strFromUTF8(u16.data(), static_cast<int32_t>(u16.size()), &u16len, s.data(),
                static_cast<int32_t>(s.size()), &ec);
  if (U_FAILURE(ec)) return std::string(s);  // not valid UTF-8: leave as-is

  std::vector<UChar> out16(u16len + 16);
  int32_t outlen = unorm2_normalize(norm, u16.data(), u16len, out16.data(),
                                    static_cast<int32_t>(out16.size()), &ec);
  if (ec == U_BUFFER_OVERFLOW_ERROR) {
    ec = U_ZERO_ERROR;
    out16.resize(outlen + 1);
    outlen = unorm2_normalize(norm, u16.data(), u16len, out16.data(),
                              static_cast<int32_t>(out16.size()), &ec);
  }
  if (U_FAILURE(ec)) return std::string(s);

  std::string out(static_cast<std::size_t>(outlen) * 4 + 4, '\0');
  int32_t u8len = 0;
  u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &u8len, out16.data(), outlen, &ec);
  if (U_FAILURE(ec)) return std::string(s);
  out.resize(static_cast<std::size_t>(u8len));
  return out;
}

std::string exact_match_key(std::string_view s) { return nfc(trim(s)); }

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

}  // namespace disto::text
