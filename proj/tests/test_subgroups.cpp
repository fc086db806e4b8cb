#include <doctest.h>

#include "medeq/errors.hpp"
#include "medeq/subgroups.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace medeq;

namespace {

std::set<std::pair<oracle::NamedPattern, std::size_t>> named_counts(const Schema& s,
                                                                    const std::vector<CombinationCount>& v) {
  std::set<std::pair<oracle::NamedPattern, std::size_t>> out;
  for (const auto& c : v) out.insert({oracle::named(s, c.pattern), c.count});
  return out;
}

}  // namespace

TEST_CASE("count_matches") {
  const Schema s = testutil::make_schema({2, 3});
  const Dataset d(s, {{0, 0}, {0, 1}, {1, 1}, {0, 1}, {1, 2}, {1, 0}});
  CHECK(count_matches(d, Pattern{}) == 6);
  CHECK(count_matches(d, Pattern({{0, 0}, {1, 1}})) == 2);
  CHECK(count_matches(d, Pattern({{0, 0}, {1, 2}})) == 0);
  CHECK_THROWS_AS(count_matches(d, Pattern({{7, 0}})), DataError);
}

TEST_CASE("pattern algebra") {
  const Schema s = demo_schema();
  const auto p = Pattern::from_labels(s, {{"race", "Asian"}, {"gender", "Female"}});
  CHECK(p.bindings().front().column == 0);
  CHECK(p.to_string(s) == "gender=Female,race=Asian");
  CHECK(Pattern{}.to_string(s) == "*");
  CHECK(Pattern::from_json(s, p.to_json(s)) == p);
  CHECK(p.specializes(p.without(1)));
  CHECK_FALSE(p.without(1).specializes(p));
  CHECK_THROWS_AS(Pattern({{0, 0}, {0, 1}}), DataError);
  CHECK_THROWS_AS(Pattern::from_labels(s, {{"race", "Martian"}}), DataError);
}

TEST_CASE("uncovered_combinations boundaries") {
  const Schema s = testutil::make_schema({2, 2});
  const Dataset d(s, {{0, 0}, {0, 0}, {0, 1}, {1, 0}});
  const auto t1 = uncovered_combinations(d, 1);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].pattern == Pattern({{0, 1}, {1, 1}}));
  CHECK(t1[0].count == 0);
  CHECK(uncovered_combinations(d, 5).size() == 4);
  CHECK_THROWS(uncovered_combinations(d, 0));
  // lexicographic order, first column most significant
  const auto all = uncovered_combinations(d, 100);
  CHECK(std::is_sorted(all.begin(), all.end(),
                       [](const auto& a, const auto& b) { return a.pattern < b.pattern; }));
}

TEST_CASE("uncovered_combinations agrees with group-by on the demo cohort") {
  const Dataset d = generate_demo_cohort(demo_cohort_spec(10000, 42));
  const auto got = named_counts(d.schema(), uncovered_combinations(d, 150));
  const auto key = testutil::protected_names(d.schema());
  CHECK(got == oracle::uncovered_full(d, 150, key));
  CHECK(got.size() >= 10);
}

TEST_CASE("coverage partitions the cross product and is monotone in tau") {
  const Schema s = testutil::make_schema({2, 3, 2});
  const Dataset d = testutil::random_dataset(s, 120, 9);
  const auto key = s.protected_columns();
  for (std::size_t tau : {1u, 5u, 10u, 20u}) {
    const auto rep = coverage_report(d, tau, key);
    CHECK(rep.entries.size() == 12);
    std::size_t total = 0;
    for (const auto& e : rep.entries) {
      CHECK(e.covered == (e.count >= tau));
      total += e.count;
    }
    CHECK(total == d.size());
    const auto lo = named_counts(s, uncovered_combinations(d, tau));
    const auto hi = named_counts(s, uncovered_combinations(d, tau + 7));
    CHECK(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
  }
}

TEST_CASE("enumerate_mups trivial cases") {
  const Schema s = testutil::make_schema({2, 2});
  const Dataset full(s, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(enumerate_mups(full, 1).patterns.empty());
  const auto root = enumerate_mups(Dataset(s), 1);
  REQUIRE(root.patterns.size() == 1);
  CHECK(root.patterns[0].is_wildcard());
}

TEST_CASE("enumerate_mups matches the exhaustive lattice scan") {
  for (const auto& cards : {std::vector<std::size_t>{2, 2, 2}, std::vector<std::size_t>{2, 3, 4}}) {
    const Schema s = testutil::make_schema(cards, {2});
    const auto key = testutil::protected_names(s);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Dataset d = testutil::random_dataset(s, 40 + 7 * seed, seed);
      const std::size_t tau = 1 + seed % 9;
      const auto m = enumerate_mups(d, tau);
      CHECK(oracle::named_set(s, m.patterns) == oracle::mups(d, tau, key));
      for (const auto& p : m.patterns) {
        CHECK(count_matches(d, p) < tau);
        for (const auto& b : p.bindings()) CHECK(count_matches(d, p.without(b.column)) >= tau);
        for (const auto& q : m.patterns)
          if (!(p == q)) CHECK_FALSE(p.specializes(q));
      }
    }
  }
}

TEST_CASE("greedy_combination_selection") {
  const Schema s = testutil::make_schema({2, 2, 2});
  const auto key = s.protected_columns();

  SUBCASE("single one-binding MUP extends to the smallest completion") {
    const auto out = greedy_combination_selection(MupSet{{Pattern({{1, 1}})}}, s);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Pattern({{0, 0}, {1, 1}, {2, 0}}));
  }
  SUBCASE("compatible MUPs share one completion, matching the minimum cover") {
    const MupSet m{{Pattern({{0, 1}}), Pattern({{2, 0}})}};
    const auto out = greedy_combination_selection(m, s);
    CHECK(out.size() == 1);
    CHECK(out.size() == oracle::min_set_cover(s, testutil::protected_names(s), oracle::named_set(s, m.patterns)));
  }
  SUBCASE("contradictory bindings force a split") {
    const MupSet m{{Pattern({{0, 0}}), Pattern({{0, 1}})}};
    const auto out = greedy_combination_selection(m, s);
    CHECK(out.size() >= 2);
    for (const auto& mup : m.patterns) {
      bool hit = false;
      for (const auto& f : out) hit = hit || f.specializes(mup);
      CHECK(hit);
    }
  }
  SUBCASE("random MUP sets are covered within |MUPs| patterns") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Dataset d = testutil::random_dataset(s, 20 + seed, seed);
      const auto m = enumerate_mups(d, 2 + seed % 5);
      if (m.patterns.empty()) continue;
      const auto out = greedy_combination_selection(m, s);
      CHECK(out.size() <= m.patterns.size());
      CHECK(out.size() >= oracle::min_set_cover(s, testutil::protected_names(s), oracle::named_set(s, m.patterns)));
      for (const auto& f : out) CHECK(f.binds_exactly(key));
      for (const auto& mup : m.patterns) {
        bool hit = false;
        for (const auto& f : out) hit = hit || f.specializes(mup);
        CHECK(hit);
      }
    }
  }
  CHECK_THROWS(greedy_combination_selection(MupSet{}, s));
}
