#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a `_serial` twin that
// is kept as the reference implementation for tests and the benchmark.

#include <cstddef>
#include <span>
#include <vector>

#include "medeq/dataset.hpp"

namespace medeq {

// Dense row-major matrix of encoded records.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

namespace kernels {

// Mixed-radix cell index of each full combination over `key`; result has
// one slot per combination in lexicographic order.
std::vector<std::size_t> group_counts(const Dataset& d, std::span<const std::size_t> key);
std::vector<std::size_t> group_counts_serial(const Dataset& d, std::span<const std::size_t> key);

double squared_distance(std::span<const double> a, std::span<const double> b);
inline double rbf(std::span<const double> a, std::span<const double> b, double gamma);

// out[j] = exp(-gamma * |x_i - x_j|^2) for every row j of X.
void kernel_row(const FeatureMatrix& x, std::size_t i, double gamma, std::span<double> out);
void kernel_row_serial(const FeatureMatrix& x, std::size_t i, double gamma, std::span<double> out);

// f(q) = sum_s coef[s] * K(sv_s, q) - rho for every row q of `queries`.
std::vector<double> decision_values(const FeatureMatrix& support, std::span<const double> coef,
                                    double rho, double gamma, const FeatureMatrix& queries);
std::vector<double> decision_values_serial(const FeatureMatrix& support,
                                           std::span<const double> coef, double rho, double gamma,
                                           const FeatureMatrix& queries);

}  // namespace kernels
}  // namespace medeq

#include <cmath>

inline double medeq::kernels::rbf(std::span<const double> a, std::span<const double> b,
                                  double gamma) {
  return std::exp(-gamma * squared_distance(a, b));
}
