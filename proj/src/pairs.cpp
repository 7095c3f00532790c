#include "pm/pairs.hpp"

#include <algorithm>
#include <array>

namespace pm {

namespace {

constexpr std::array<std::pair<Split, std::string_view>, 5> kSplitNames{{
    {Split::test, "test"},
    {Split::train_small, "train_small"},
    {Split::train_medium, "train_medium"},
    {Split::train_large, "train_large"},
    {Split::unsplit, "unsplit"},
}};

}  // namespace

std::string make_pair_id(std::string_view id_left, std::string_view id_right) {
  std::string id;
  id.reserve(id_left.size() + id_right.size() + 1);
  id.append(id_left).append("#").append(id_right);
  return id;
}

std::string_view to_string(Split split) noexcept {
  for (const auto& [s, name] : kSplitNames)
    if (s == split) return name;
  return "unsplit";
}

std::optional<Split> split_from_string(std::string_view name) noexcept {
  for (const auto& [s, n] : kSplitNames)
    if (n == name) return s;
  return std::nullopt;
}

std::size_t PairDataset::positives() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const OfferPair& p) { return p.label == 1; }));
}

}  // namespace pm
