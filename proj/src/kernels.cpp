#include "medeq/kernels.hpp"

#include <omp.h>

#include "medeq/errors.hpp"

namespace medeq::kernels {

namespace {

struct Radix {
  std::vector<std::size_t> columns;
  std::vector<std::size_t> stride;
  std::size_t cells = 1;

  Radix(const Schema& schema, std::span<const std::size_t> key) : columns(key.begin(), key.end()) {
    stride.resize(key.size());
    for (std::size_t k = key.size(); k-- > 0;) {
      if (key[k] >= schema.size()) throw DataError("key references unknown column");
      stride[k] = cells;
      cells *= schema.column(key[k]).cardinality();
    }
  }

  std::size_t cell(const Record& r) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < columns.size(); ++k) idx += r[columns[k]] * stride[k];
    return idx;
  }
};

}  // namespace

std::vector<std::size_t> group_counts_serial(const Dataset& d, std::span<const std::size_t> key) {
  Radix radix(d.schema(), key);
  std::vector<std::size_t> counts(radix.cells, 0);
  for (const auto& r : d.rows()) ++counts[radix.cell(r)];
  return counts;
}

std::vector<std::size_t> group_counts(const Dataset& d, std::span<const std::size_t> key) {
  Radix radix(d.schema(), key);
  std::vector<std::size_t> counts(radix.cells, 0);
  const auto& rows = d.rows();
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel
  {
    std::vector<std::size_t> local(radix.cells, 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) ++local[radix.cell(rows[i])];
#pragma omp critical
    for (std::size_t c = 0; c < local.size(); ++c) counts[c] += local[c];
  }
  return counts;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

void kernel_row_serial(const FeatureMatrix& x, std::size_t i, double gamma, std::span<double> out) {
  const auto xi = x.row(i);
  for (std::size_t j = 0; j < x.rows; ++j) out[j] = rbf(xi, x.row(j), gamma);
}

void kernel_row(const FeatureMatrix& x, std::size_t i, double gamma, std::span<double> out) {
  const auto xi = x.row(i);
  const auto n = static_cast<std::ptrdiff_t>(x.rows);
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = rbf(xi, x.row(j), gamma);
}

std::vector<double> decision_values_serial(const FeatureMatrix& support,
                                           std::span<const double> coef, double rho, double gamma,
                                           const FeatureMatrix& queries) {
  std::vector<double> out(queries.rows);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    double s = 0.0;
    for (std::size_t k = 0; k < support.rows; ++k)
      s += coef[k] * rbf(support.row(k), queries.row(q), gamma);
    out[q] = s - rho;
  }
  return out;
}

std::vector<double> decision_values(const FeatureMatrix& support, std::span<const double> coef,
                                    double rho, double gamma, const FeatureMatrix& queries) {
  std::vector<double> out(queries.rows);
  const auto n = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel for schedule(static) if (n * support.rows > 65536)
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    double s = 0.0;
    for (std::size_t k = 0; k < support.rows; ++k)
      s += coef[k] * rbf(support.row(k), queries.row(q), gamma);
    out[q] = s - rho;
  }
  return out;
}

}  // namespace medeq::kernels
