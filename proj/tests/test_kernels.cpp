#include <doctest.h>

#include <cmath>

#include "medeq/encode.hpp"
#include "medeq/kernels.hpp"
#include "medeq/subgroups.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace medeq;

TEST_CASE("group_counts parallel equals serial and group-by") {
  const Dataset d = generate_demo_cohort(demo_cohort_spec(20000, 8));
  const auto key = d.schema().protected_columns();
  const auto par = kernels::group_counts(d, key);
  CHECK(par == kernels::group_counts_serial(d, key));
  const auto combos = full_combinations(d.schema(), key);
  REQUIRE(combos.size() == par.size());
  const auto gb = oracle::group_by(d, {"gender", "race", "age"});
  for (std::size_t i = 0; i < combos.size(); ++i) {
    oracle::Labels labels;
    for (const auto& b : combos[i].bindings()) labels.push_back(d.schema().column(b.column).values[b.value]);
    const auto it = gb.find(labels);
    CHECK(par[i] == (it == gb.end() ? 0 : it->second));
  }
}

TEST_CASE("kernel_row and decision_values parallel equal serial") {
  const Dataset d = generate_demo_cohort(demo_cohort_spec(5000, 3));
  const Encoder e(d.schema());
  const auto x = e.encode_all(d.rows());
  const double gamma = 1.0 / static_cast<double>(e.dimension());
  std::vector<double> a(x.rows), b(x.rows);
  for (std::size_t i : {0u, 17u, 4999u}) {
    kernels::kernel_row(x, i, gamma, a);
    kernels::kernel_row_serial(x, i, gamma, b);
    CHECK(a == b);
    CHECK(a[i] == 1.0);
    CHECK(a[1] == doctest::Approx(std::exp(-gamma * kernels::squared_distance(x.row(i), x.row(1)))));
  }
  FeatureMatrix sv(300, x.cols);
  std::copy(x.data.begin(), x.data.begin() + static_cast<std::ptrdiff_t>(300 * x.cols), sv.data.begin());
  std::vector<double> coef(300, 1.0 / 300);
  CHECK(kernels::decision_values(sv, coef, 0.3, gamma, x) ==
        kernels::decision_values_serial(sv, coef, 0.3, gamma, x));
}
