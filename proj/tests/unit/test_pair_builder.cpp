#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "pm/errors.hpp"
#include "pm/io.hpp"
#include "pm/pair_builder.hpp"

using namespace pm;

namespace {

Offer offer(std::string id, std::string ean, std::string seller, std::string title, std::string category = "c") {
  return Offer{std::move(id), std::move(ean), std::move(seller), std::move(title), std::move(category)};
}

std::vector<OfferPair> dummy_pairs(std::size_t n, int label, const std::string& prefix) {
  std::vector<OfferPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    OfferPair p;
    p.id_left = prefix + "a" + std::to_string(i);
    p.id_right = prefix + "b" + std::to_string(i);
    p.pair_id = make_pair_id(p.id_left, p.id_right);
    p.title_left = "left " + std::to_string(i);
    p.title_right = "right " + std::to_string(i);
    p.label = label;
    out.push_back(std::move(p));
  }
  return out;
}

std::set<std::string> ids_of(const PairDataset& ds, int label) {
  std::set<std::string> out;
  for (const auto& p : ds.pairs)
    if (p.label == label) out.insert(p.pair_id);
  return out;
}

}  // namespace

TEST_CASE("positive pairs are every same-EAN combination") {
  OfferTable t;
  t.offers = {offer("a", "1", "S1", "x"), offer("b", "1", "S2", "x"), offer("c", "1", "S3", "x"),
              offer("d", "2", "S1", "y"), offer("e", "2", "S2", "y")};
  const auto pos = build_positive_pairs(t);
  REQUIRE(pos.size() == 4);  // C(3,2) + C(2,2)
  CHECK(pos[0].pair_id == "a#b");
  CHECK(pos[1].pair_id == "a#c");
  CHECK(pos[2].pair_id == "b#c");
  CHECK(pos[3].pair_id == "d#e");
  for (const auto& p : pos) {
    CHECK(p.label == 1);
    CHECK(p.ean_left == p.ean_right);
    CHECK(p.id_left < p.id_right);
  }
}

TEST_CASE("positive pair count is the sum of group binomials on random tables") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = testing::random_table(seed, 60);
    std::map<std::string, std::size_t> groups;
    for (const auto& o : t.offers) ++groups[o.ean];
    std::size_t expected = 0;
    for (const auto& [ean, m] : groups) expected += m * (m - 1) / 2;
    const auto pos = build_positive_pairs(t);
    CHECK(pos.size() == expected);
    CHECK(testing::pair_keys(pos).size() == pos.size());
  }
}

TEST_CASE("hard negatives match the brute-force oracle") {
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    const auto t = testing::random_table(seed, 80);
    for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{20}}) {
      const auto neg = mine_negative_pairs(t, k);
      CAPTURE(seed);
      CAPTURE(k);
      CHECK(testing::pair_keys(neg) == testing::brute_force_negatives(t, k));
      CHECK(testing::pair_keys(neg).size() == neg.size());
    }
  }
}

TEST_CASE("hard negatives: labels, orientation, category and EAN constraints") {
  const auto t = testing::synthetic_table({});
  std::map<std::string, const Offer*> by_id;
  for (const auto& o : t.offers) by_id[o.id] = &o;
  const auto neg = mine_negative_pairs(t, 5);
  REQUIRE_FALSE(neg.empty());
  for (std::size_t i = 0; i < neg.size(); ++i) {
    const auto& p = neg[i];
    CHECK(p.label == 0);
    CHECK(p.id_left < p.id_right);
    CHECK(by_id.at(p.id_left)->category == by_id.at(p.id_right)->category);
    CHECK(by_id.at(p.id_left)->ean != by_id.at(p.id_right)->ean);
    CHECK(p.category == by_id.at(p.id_left)->category);
    if (i > 0) CHECK(std::pair(neg[i - 1].id_left, neg[i - 1].id_right) < std::pair(p.id_left, p.id_right));
  }
  // at most k mined per offer, so the union is at most k per offer
  CHECK(neg.size() <= 5 * t.offers.size());
}

TEST_CASE("hard negatives do not depend on the thread count") {
  const auto t = testing::synthetic_table({});
  const auto one = mine_negative_pairs(t, 20, 1);
  CHECK(mine_negative_pairs(t, 20, 3) == one);
  CHECK(mine_negative_pairs(t, 20, 8) == one);
}

TEST_CASE("hard negatives edge cases") {
  OfferTable single_ean;
  single_ean.offers = {offer("a", "1", "S1", "x"), offer("b", "1", "S2", "x")};
  CHECK(mine_negative_pairs(single_ean, 20).empty());
  CHECK(mine_negative_pairs(OfferTable{}, 20).empty());

  OfferTable split_categories;
  split_categories.offers = {offer("a", "1", "S1", "x", "c1"), offer("b", "2", "S2", "x", "c2")};
  CHECK(mine_negative_pairs(split_categories, 20).empty());

  OfferTable two;
  two.offers = {offer("b", "1", "S1", "x"), offer("a", "2", "S2", "y")};
  const auto neg = mine_negative_pairs(two, 0);
  CHECK(neg.empty());
  const auto neg1 = mine_negative_pairs(two, 1);
  REQUIRE(neg1.size() == 1);
  CHECK(neg1[0].pair_id == "a#b");
  CHECK(neg1[0].title_left == "y");
}

TEST_CASE("split sizes follow the plan") {
  SplitPlan plan;
  plan.unit_positives = 10;
  const auto splits = build_splits(dummy_pairs(400, 1, "p"), dummy_pairs(1100, 0, "n"), plan, "cat");
  REQUIRE(splits.size() == 4);
  const auto& test = splits.at(Split::test);
  CHECK(test.name == "cat_test");
  CHECK(test.positives() == 300);
  CHECK(test.negatives() == 800);
  CHECK(splits.at(Split::train_small).positives() == 10);
  CHECK(splits.at(Split::train_small).negatives() == 30);
  CHECK(splits.at(Split::train_medium).positives() == 30);
  CHECK(splits.at(Split::train_medium).negatives() == 90);
  CHECK(splits.at(Split::train_large).positives() == 70);
  CHECK(splits.at(Split::train_large).negatives() == 210);
}

TEST_CASE("automatic unit picks the largest feasible small split") {
  SplitPlan plan;
  const auto splits = build_splits(dummy_pairs(300 + 7 * 503 + 5, 1, "p"), dummy_pairs(800 + 21 * 503 + 2, 0, "n"),
                                   plan);
  CHECK(splits.at(Split::train_small).positives() == 503);
  CHECK(splits.at(Split::train_small).negatives() == 1509);
  CHECK(splits.at(Split::train_medium).positives() == 1509);
  CHECK(splits.at(Split::train_medium).negatives() == 4527);
  CHECK(splits.at(Split::train_large).positives() == 3521);
  CHECK(splits.at(Split::train_large).negatives() == 10563);
}

TEST_CASE("split invariants: disjoint test, nested train, seeded determinism") {
  for (std::uint64_t seed : {1ULL, 42ULL, 2024ULL}) {
    SplitPlan plan;
    plan.seed = seed;
    plan.test_positives = 30;
    plan.test_negatives = 80;
    const auto pos = dummy_pairs(150, 1, "p");
    const auto neg = dummy_pairs(500, 0, "n");
    const auto a = build_splits(pos, neg, plan);
    const auto b = build_splits(pos, neg, plan);
    CHECK(a == b);

    const auto test_ids = ids_of(a.at(Split::test), 1);
    const auto test_neg = ids_of(a.at(Split::test), 0);
    for (auto s : {Split::train_small, Split::train_medium, Split::train_large}) {
      for (const auto& p : a.at(s).pairs) {
        CHECK_FALSE(test_ids.contains(p.pair_id));
        CHECK_FALSE(test_neg.contains(p.pair_id));
      }
      const auto& ds = a.at(s);
      CHECK(ds.negatives() == 3 * ds.positives());
    }
    for (int label : {0, 1}) {
      const auto small = ids_of(a.at(Split::train_small), label);
      const auto medium = ids_of(a.at(Split::train_medium), label);
      const auto large = ids_of(a.at(Split::train_large), label);
      CHECK(std::includes(medium.begin(), medium.end(), small.begin(), small.end()));
      CHECK(std::includes(large.begin(), large.end(), medium.begin(), medium.end()));
    }

    plan.seed = seed + 1;
    CHECK(build_splits(pos, neg, plan).at(Split::test) != a.at(Split::test));
  }
}

TEST_CASE("insufficient pools name the deficient class") {
  SplitPlan plan;
  plan.unit_positives = 10;
  try {
    build_splits(dummy_pairs(299, 1, "p"), dummy_pairs(5000, 0, "n"), plan);
    FAIL("expected InsufficientPoolError");
  } catch (const InsufficientPoolError& e) {
    CHECK(e.pair_class() == "positive");
    CHECK(e.required() == 370);
    CHECK(e.available() == 299);
  }
  try {
    build_splits(dummy_pairs(1000, 1, "p"), dummy_pairs(900, 0, "n"), plan);
    FAIL("expected InsufficientPoolError");
  } catch (const InsufficientPoolError& e) {
    CHECK(e.pair_class() == "negative");
    CHECK(e.required() == 1010);
  }
  plan.unit_positives = 0;
  CHECK_THROWS_AS(build_splits(dummy_pairs(305, 1, "p"), dummy_pairs(5000, 0, "n"), plan), InsufficientPoolError);
}

TEST_CASE("split plan validation") {
  SplitPlan plan;
  plan.ratios = {3, 1, 7};
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  plan.ratios = {0, 3, 7};
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  plan.ratios = {1, 3, 7};
  CHECK_NOTHROW(plan.validate());
}

TEST_CASE("emitted files are byte-identical and gunzip to the JSON-lines form") {
  testing::ScratchDir dir("emit");
  const auto ds = testing::random_dataset(5);
  emit_wdc(ds, dir / "a.json.gz");
  emit_wdc(ds, dir / "nested/b.json.gz");
  const auto a = io::read_file(dir / "a.json.gz");
  CHECK(a == io::read_file(dir / "nested/b.json.gz"));
  CHECK(io::is_gzip(a));
  CHECK(io::gunzip(a) == to_wdc_jsonl(ds));
  CHECK(load_wdc_pairs(a, ds.name, ds.split) == ds);
}

TEST_CASE("gzip helpers") {
  CHECK(io::gunzip(io::gzip("")) == "");
  const std::string big(100000, 'q');
  CHECK(io::gunzip(io::gzip(big)) == big);
  CHECK(io::gunzip(io::gzip("ab") + io::gzip("cd")) == "abcd");
  const auto z = io::gzip("hello world");
  CHECK_THROWS_AS(io::gunzip(z.substr(0, z.size() - 4)), IoError);
  CHECK(io::maybe_gunzip("plain") == "plain");
}
