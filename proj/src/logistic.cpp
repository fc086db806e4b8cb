#include <cmath>

#include "medeq/errors.hpp"
#include "medeq/filter.hpp"

namespace medeq {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

LogisticObjective::LogisticObjective(const FeatureMatrix& x_, std::span<const int> labels_,
                                     double lambda_)
    : x(x_), labels(labels_), lambda(lambda_), class_weight(2, 0.0) {
  if (labels.size() != x.rows) throw DataError("label count does not match feature rows");
  std::size_t n1 = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    n1 += static_cast<std::size_t>(y);
  }
  const std::size_t n0 = labels.size() - n1;
  if (n0 == 0 || n1 == 0) throw DataError("discriminator needs samples from both classes");
  const double n = static_cast<double>(labels.size());
  class_weight[0] = n / (2.0 * static_cast<double>(n0));
  class_weight[1] = n / (2.0 * static_cast<double>(n1));
}

double LogisticObjective::value(std::span<const double> w, double b) const {
  double j = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double z = dot(w, x.row(i)) + b;
    j += class_weight[labels[i]] * (labels[i] * z - softplus(z));
  }
  return j - 0.5 * lambda * dot(w, w);
}

double LogisticObjective::gradient(std::span<const double> w, double b, std::span<double> grad_w) const {
  for (std::size_t k = 0; k < grad_w.size(); ++k) grad_w[k] = -lambda * w[k];
  double gb = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto xi = x.row(i);
    const double r = class_weight[labels[i]] * (labels[i] - sigmoid(dot(w, xi) + b));
    for (std::size_t k = 0; k < grad_w.size(); ++k) grad_w[k] += r * xi[k];
    gb += r;
  }
  return gb;
}

double DiscriminatorModel::score(std::span<const double> x) const {
  return sigmoid(dot(weights, x) + bias);
}

DiscriminatorModel fit_logistic(const FeatureMatrix& x, std::span<const int> labels,
                                const LogisticParams& params) {
  const LogisticObjective obj(x, labels, params.lambda);
  const std::size_t dim = x.cols;

  // Curvature bound of -J gives a safe first step.
  double lipschitz = params.lambda;
  for (std::size_t i = 0; i < x.rows; ++i)
    lipschitz += 0.25 * obj.class_weight[labels[i]] * (dot(x.row(i), x.row(i)) + 1.0);
  double step = 1.0 / lipschitz;

  DiscriminatorModel model;
  model.weights.assign(dim, 0.0);
  std::vector<double> gw(dim), trial_w(dim);
  double current = obj.value(model.weights, model.bias);
  std::size_t it = 0;
  for (; it < params.max_iterations; ++it) {
    const double gb = obj.gradient(model.weights, model.bias, gw);
    const double norm2 = dot(gw, gw) + gb * gb;
    model.gradient_norm = std::sqrt(norm2);
    if (model.gradient_norm <= params.gradient_tolerance) break;
    step *= 2.0;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t k = 0; k < dim; ++k) trial_w[k] = model.weights[k] + step * gw[k];
      const double trial_b = model.bias + step * gb;
      const double v = obj.value(trial_w, trial_b);
      if (v >= current + 0.5 * step * norm2) {
        model.weights.swap(trial_w);
        model.bias = trial_b;
        current = v;
        break;
      }
      step *= 0.5;
    }
  }
  if (it == params.max_iterations) {
    const double gb = obj.gradient(model.weights, model.bias, gw);
    model.gradient_norm = std::sqrt(dot(gw, gw) + gb * gb);
  }
  model.iterations = it;
  for (double w : model.weights)
    if (!std::isfinite(w)) throw SolverError("logistic fit diverged");
  return model;
}

DiscriminatorModel train_discriminator(const std::vector<Record>& real_rows,
                                       const std::vector<Record>& synth_rows, const Encoder& enc,
                                       const LogisticParams& params) {
  if (real_rows.empty() || synth_rows.empty())
    throw DataError("discriminator needs samples from both classes");
  std::vector<Record> rows = real_rows;
  rows.insert(rows.end(), synth_rows.begin(), synth_rows.end());
  std::vector<int> labels(real_rows.size(), 1);
  labels.resize(rows.size(), 0);
  return fit_logistic(enc.encode_all(rows), labels, params);
}

}  // namespace medeq
