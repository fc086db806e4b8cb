#include <doctest.h>

#include <set>

#include "medeq/encode.hpp"
#include "medeq/errors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace medeq;

TEST_CASE("encoder layout") {
  const Schema s = testutil::make_schema({2, 3});
  const Encoder e = fit_encoder(s);
  CHECK(e.dimension() == 5);
  CHECK(e.layout() == fit_encoder(s).layout());
  CHECK(e.layout()[2] == std::pair<std::string, std::string>{"p1", "p1_v0"});
  CHECK(e.offset(1) == 2);
  CHECK(fit_encoder(testutil::make_schema({2})).dimension() == 2);
}

TEST_CASE("encode is one-hot and injective") {
  const Schema s({{"gender", {"Male", "Female"}, true}, {"race", {"Asian", "Black", "White"}, true}});
  const Encoder e(s);
  CHECK(e.encode({0, 0}) == FeatureVector{1, 0, 1, 0, 0});
  CHECK_THROWS_AS(e.encode({0, 3}), DataError);

  const Schema big = demo_schema();
  const Encoder eb(big);
  std::set<FeatureVector> seen;
  const auto all = oracle::all_records(testutil::make_schema({2, 3, 2}));
  const Encoder es(testutil::make_schema({2, 3, 2}));
  for (const auto& r : all) CHECK(seen.insert(es.encode(r)).second);

  const Dataset d = generate_demo_cohort(demo_cohort_spec(500, 4));
  const auto m = eb.encode_all(d.rows());
  CHECK(m.rows == 500);
  CHECK(m.cols == eb.dimension());
  for (std::size_t i = 0; i < m.rows; ++i) {
    double sum = 0;
    for (double v : m.row(i)) {
      CHECK((v == 0.0 || v == 1.0));
      sum += v;
    }
    CHECK(sum == static_cast<double>(big.size()));
  }
}
