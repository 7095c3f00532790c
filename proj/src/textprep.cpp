#include "pm/textprep.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>

#include "pm/errors.hpp"

namespace pm {

namespace {

std::string nfc(std::string_view raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const auto input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  // fromUTF8 maps ill-formed bytes to U+FFFD, which is not alphanumeric
  icu::UnicodeString composed = normalizer->normalize(input, status);
  if (U_FAILURE(status)) return std::string(raw);
  std::string out;
  composed.toUTF8String(out);
  return out;
}

template <typename Fn>
size_t for_each_token(std::string_view text, Fn&& fn) {
  size_t count = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    const size_t start = pos;
    while (pos < text.size() && text[pos] != ' ') ++pos;
    if (pos > start) {
      fn(text.substr(start, pos - start));
      ++count;
    }
  }
  return count;
}

}  // namespace

NormalizedTitle normalize_title(std::string_view raw) {
  const std::string composed = nfc(raw);
  const auto* bytes = reinterpret_cast<const uint8_t*>(composed.data());
  const auto length = static_cast<int32_t>(composed.size());

  std::string out;
  out.reserve(composed.size());
  bool pending_space = false;
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0 || !u_isalnum(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;

    const UChar32 lower = u_tolower(c);
    char buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(reinterpret_cast<uint8_t*>(buf), n, lower);
    out.append(buf, static_cast<size_t>(n));
  }
  return NormalizedTitle(std::move(out));
}

TokenSet::TokenSet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::erase_if(tokens_, [](const std::string& t) { return t.empty(); });
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
}

bool TokenSet::contains(std::string_view token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token);
}

TokenSet tokenize(const NormalizedTitle& title) {
  std::vector<std::string> tokens;
  for_each_token(title.text(), [&](std::string_view t) { tokens.emplace_back(t); });
  return TokenSet(std::move(tokens));
}

namespace {

template <typename Range>
double sorted_jaccard(const Range& a, const Range& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

}  // namespace

double jaccard(const TokenSet& a, const TokenSet& b) {
  return sorted_jaccard(a.tokens(), b.tokens());
}

double jaccard_sorted(const std::vector<unsigned>& a, const std::vector<unsigned>& b) {
  return sorted_jaccard(a, b);
}

}  // namespace pm
