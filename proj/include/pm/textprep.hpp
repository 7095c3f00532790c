#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pm {

/// Lowercase alphanumeric tokens separated by single spaces, no leading or
/// trailing space. Only `normalize_title` produces one.
class NormalizedTitle {
 public:
  NormalizedTitle() = default;

  const std::string& text() const noexcept { return text_; }
  bool empty() const noexcept { return text_.empty(); }

  friend bool operator==(const NormalizedTitle&, const NormalizedTitle&) = default;

 private:
  friend NormalizedTitle normalize_title(std::string_view raw);
  explicit NormalizedTitle(std::string text) : text_(std::move(text)) {}

  std::string text_;
};

/// Set of whitespace-free, non-empty tokens kept sorted and unique.
class TokenSet {
 public:
  TokenSet() = default;

  /// Sorts and deduplicates; empty tokens are dropped.
  explicit TokenSet(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  bool contains(std::string_view token) const;

  friend bool operator==(const TokenSet&, const TokenSet&) = default;

 private:
  std::vector<std::string> tokens_;
};

/// Lowercases, replaces every character that is not a Unicode letter or
/// decimal digit with a space, collapses whitespace runs and trims.
/// Input is NFC-composed first so combining diacritics stay attached to
/// their base letter. Invalid UTF-8 bytes count as separators.
NormalizedTitle normalize_title(std::string_view raw);

TokenSet tokenize(const NormalizedTitle& title);

/// |a ∩ b| / |a ∪ b|, or 0 when both sets are empty.
double jaccard(const TokenSet& a, const TokenSet& b);

/// Jaccard over sorted, duplicate-free integer token ids.
double jaccard_sorted(const std::vector<unsigned>& a, const std::vector<unsigned>& b);

}  // namespace pm
