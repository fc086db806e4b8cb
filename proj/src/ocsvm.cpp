#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <map>
#include <unordered_map>

#include "medeq/errors.hpp"
#include "medeq/filter.hpp"

namespace medeq {

namespace {

// LRU cache of kernel matrix rows.
class KernelCache {
 public:
  KernelCache(const FeatureMatrix& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.rows * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const std::vector<double>& row(std::size_t i) {
    auto it = rows_.find(i);
    if (it != rows_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    if (rows_.size() >= capacity_) {
      rows_.erase(lru_.back());
      lru_.pop_back();
    }
    lru_.push_front(i);
    auto& slot = rows_[i];
    slot.second = lru_.begin();
    slot.first.resize(x_.rows);
    kernels::kernel_row(x_, i, gamma_, slot.first);
    return slot.first;
  }

 private:
  const FeatureMatrix& x_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> rows_;
};

double violation_of(std::span<const double> alpha, std::span<const double> upper,
                    std::span<const double> grad) {
  double up_min = std::numeric_limits<double>::infinity();
  double low_max = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    if (alpha[t] < upper[t]) up_min = std::min(up_min, grad[t]);
    if (alpha[t] > 0.0) low_max = std::max(low_max, grad[t]);
  }
  if (!std::isfinite(up_min) || !std::isfinite(low_max)) return 0.0;
  return std::max(0.0, low_max - up_min);
}

// Lower end of the KKT interval for rho: min G over variables below their
// upper bound. Every such point then has decision >= 0, so only bounded
// support vectors can be outliers.
double offset_of(std::span<const double> alpha, std::span<const double> upper,
                 std::span<const double> grad) {
  double below = std::numeric_limits<double>::infinity();
  double at_upper = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    if (alpha[t] < upper[t])
      below = std::min(below, grad[t]);
    else
      at_upper = std::max(at_upper, grad[t]);
  }
  return std::isfinite(below) ? below : at_upper;
}

}  // namespace

DualSolution solve_one_class_dual(const FeatureMatrix& x, std::span<const double> upper,
                                  double gamma, const OcsvmParams& params) {
  const std::size_t m = x.rows;
  if (m == 0) throw DataError("one-class SVM needs at least one training point");
  if (upper.size() != m) throw DataError("box bounds do not match the training set");
  if (!(gamma > 0.0)) throw DataError("kernel width must be positive");
  double capacity = 0.0;
  for (double u : upper) capacity += u;
  if (capacity < 1.0 - 1e-12) throw DataError("box bounds admit no feasible point");

  DualSolution sol;
  sol.alpha.assign(m, 0.0);
  double remaining = 1.0;
  for (std::size_t t = 0; t < m && remaining > 0.0; ++t) {
    sol.alpha[t] = std::min(upper[t], remaining);
    remaining -= sol.alpha[t];
  }
  // absorb rounding so that the weights sum to 1
  for (std::size_t t = 0; t < m && remaining > 0.0; ++t) {
    const double room = upper[t] - sol.alpha[t];
    const double add = std::min(room, remaining);
    sol.alpha[t] += add;
    remaining -= add;
  }

  KernelCache cache(x, gamma, params.cache_bytes);
  auto& grad = sol.gradient;
  grad.assign(m, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    if (sol.alpha[t] == 0.0) continue;
    const auto& q = cache.row(t);
    for (std::size_t k = 0; k < m; ++k) grad[k] += sol.alpha[t] * q[k];
  }

  constexpr double kTau = 1e-12;
  std::size_t iter = 0;
  for (;; ++iter) {
    std::ptrdiff_t i = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
      if (sol.alpha[t] < upper[t] && grad[t] < g_min) {
        g_min = grad[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (sol.alpha[t] > 0.0) g_max = std::max(g_max, grad[t]);
    }
    if (i < 0 || !(g_max - g_min > params.tolerance)) break;
    if (iter >= params.max_iterations) {
      throw SolverError("one-class SVM did not converge in " + std::to_string(iter) +
                        " iterations (KKT violation " + std::to_string(g_max - g_min) + ")");
    }

    const auto ui = static_cast<std::size_t>(i);
    const auto& qi = cache.row(ui);
    std::ptrdiff_t j = -1;
    double best_gain = -1.0;
    for (std::size_t t = 0; t < m; ++t) {
      if (!(sol.alpha[t] > 0.0) || !(grad[t] > g_min)) continue;
      const double b = grad[t] - g_min;
      double a = 2.0 - 2.0 * qi[t];
      if (a <= 0.0) a = kTau;
      const double gain = b * b / a;
      if (gain > best_gain) {
        best_gain = gain;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (j < 0) break;
    const auto uj = static_cast<std::size_t>(j);

    double curvature = 2.0 - 2.0 * qi[uj];
    if (curvature <= 0.0) curvature = kTau;
    double step = (grad[uj] - grad[ui]) / curvature;
    const double room_i = upper[ui] - sol.alpha[ui];
    const double room_j = sol.alpha[uj];
    step = std::min({step, room_i, room_j});
    // land exactly on the bounds
    sol.alpha[ui] = step == room_i ? upper[ui] : sol.alpha[ui] + step;
    sol.alpha[uj] = step == room_j ? 0.0 : sol.alpha[uj] - step;

    const auto& qi2 = cache.row(ui);
    const auto& qj = cache.row(uj);
    for (std::size_t k = 0; k < m; ++k) grad[k] += step * (qi2[k] - qj[k]);
  }

  sol.iterations = iter;
  sol.kkt_violation = violation_of(sol.alpha, upper, grad);
  sol.rho = offset_of(sol.alpha, upper, grad);
  double obj = 0.0;
  for (std::size_t t = 0; t < m; ++t) obj += sol.alpha[t] * grad[t];
  sol.objective = 0.5 * obj;
  return sol;
}

double kkt_violation(const FeatureMatrix& x, std::span<const double> alpha,
                     std::span<const double> upper, double gamma) {
  std::vector<double> grad(x.rows, 0.0), row(x.rows);
  for (std::size_t t = 0; t < x.rows; ++t) {
    if (alpha[t] == 0.0) continue;
    kernels::kernel_row_serial(x, t, gamma, row);
    for (std::size_t k = 0; k < x.rows; ++k) grad[k] += alpha[t] * row[k];
  }
  return violation_of(alpha, upper, grad);
}

double OcsvmModel::decision(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < support_vectors.rows; ++k)
    s += support_alpha[k] * kernels::rbf(support_vectors.row(k), x, gamma);
  return s - rho;
}

std::vector<double> OcsvmModel::decisions(const FeatureMatrix& queries) const {
  return kernels::decision_values(support_vectors, support_alpha, rho, gamma, queries);
}

OcsvmModel train_ocsvm(const FeatureMatrix& x, const OcsvmParams& params) {
  const std::size_t m = x.rows;
  if (m == 0) throw DataError("one-class SVM needs a non-empty real dataset");
  if (!(params.nu > 0.0 && params.nu <= 1.0)) throw DataError("nu must lie in (0, 1]");
  const double gamma = params.gamma.value_or(1.0 / static_cast<double>(std::max<std::size_t>(1, x.cols)));
  if (!(gamma > 0.0)) throw DataError("kernel width must be positive");
  const double c = 1.0 / (params.nu * static_cast<double>(m));

  // merge duplicate rows, first occurrence order
  std::map<std::vector<double>, std::size_t> index;
  std::vector<std::size_t> group(m);
  std::vector<std::size_t> first;
  std::vector<std::size_t> multiplicity;
  for (std::size_t t = 0; t < m; ++t) {
    std::vector<double> key(x.row(t).begin(), x.row(t).end());
    auto [it, inserted] = index.emplace(std::move(key), first.size());
    if (inserted) {
      first.push_back(t);
      multiplicity.push_back(0);
    }
    group[t] = it->second;
    ++multiplicity[it->second];
  }
  FeatureMatrix unique(first.size(), x.cols);
  std::vector<double> upper(first.size());
  for (std::size_t u = 0; u < first.size(); ++u) {
    std::copy(x.row(first[u]).begin(), x.row(first[u]).end(), unique.row(u).begin());
    upper[u] = c * static_cast<double>(multiplicity[u]);
  }

  const DualSolution sol = solve_one_class_dual(unique, upper, gamma, params);

  OcsvmModel model;
  model.gamma = gamma;
  model.nu = params.nu;
  model.upper_bound = c;
  model.rho = sol.rho;
  model.objective = sol.objective;
  model.kkt_violation = sol.kkt_violation;
  model.iterations = sol.iterations;

  std::vector<double> left = sol.alpha;
  model.alpha.assign(m, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t u = group[t];
    const double share = std::min(c, left[u]);
    model.alpha[t] = share;
    left[u] -= share;
  }

  std::size_t sv = 0;
  for (double a : sol.alpha) sv += a > 0.0;
  model.support_vectors = FeatureMatrix(sv, x.cols);
  std::size_t k = 0;
  for (std::size_t u = 0; u < first.size(); ++u) {
    if (!(sol.alpha[u] > 0.0)) continue;
    std::copy(unique.row(u).begin(), unique.row(u).end(), model.support_vectors.row(k).begin());
    model.support_alpha.push_back(sol.alpha[u]);
    ++k;
  }
  return model;
}

OcsvmModel train_ocsvm(const Dataset& real, const Encoder& enc, const OcsvmParams& params) {
  if (real.empty()) throw DataError("one-class SVM needs a non-empty real dataset");
  return train_ocsvm(enc.encode_all(real.rows()), params);
}

std::vector<Record> ocsvm_filter(const OcsvmModel& model, const SampleBatch& batch,
                                 const Encoder& enc) {
  if (batch.records.empty()) return {};
  const auto d = model.decisions(enc.encode_all(batch.records));
  std::vector<Record> kept;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] >= 0.0) kept.push_back(batch.records[i]);
  return kept;
}

}  // namespace medeq
