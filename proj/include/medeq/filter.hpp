#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "medeq/dataset.hpp"
#include "medeq/encode.hpp"
#include "medeq/generators.hpp"
#include "medeq/kernels.hpp"
#include "medeq/rng.hpp"

namespace medeq {

// ---- one-class SVM ---------------------------------------------------------

struct OcsvmParams {
  double nu = 0.05;
  std::optional<double> gamma;  // defaults to 1 / dimension
  double tolerance = 1e-5;      // KKT violation at which the solver stops
  std::size_t max_iterations = 10'000'000;
  std::size_t cache_bytes = std::size_t{256} << 20;
};

// Solution of
//   min 1/2 a'Qa  s.t.  sum a = 1,  0 <= a_i <= upper_i,  Q_ij = K(x_i, x_j)
struct DualSolution {
  std::vector<double> alpha;
  std::vector<double> gradient;  // Qa
  double rho = 0.0;
  double objective = 0.0;
  double kkt_violation = 0.0;  // max_{a_i>0} G_i - min_{a_i<upper_i} G_i, clipped at 0
  std::size_t iterations = 0;
};

// Pairwise working-set (SMO) solver with second-order working-set
// selection. Throws SolverError when the iteration cap is hit.
DualSolution solve_one_class_dual(const FeatureMatrix& x, std::span<const double> upper,
                                  double gamma, const OcsvmParams& params);

// KKT violation of an arbitrary feasible point, recomputed from scratch.
double kkt_violation(const FeatureMatrix& x, std::span<const double> alpha,
                     std::span<const double> upper, double gamma);

struct OcsvmModel {
  FeatureMatrix support_vectors;
  std::vector<double> support_alpha;
  // One weight per training row; sums to 1, each in [0, upper_bound].
  std::vector<double> alpha;
  double rho = 0.0;
  double gamma = 0.0;
  double nu = 0.0;
  double upper_bound = 0.0;  // 1 / (nu * m)
  double objective = 0.0;
  double kkt_violation = 0.0;
  std::size_t iterations = 0;

  // sum_i alpha_i K(x_i, x) - rho; inlier iff >= 0.
  double decision(std::span<const double> x) const;
  std::vector<double> decisions(const FeatureMatrix& queries) const;
};

// Identical training records share a kernel row, so they are merged into one
// dual variable with a proportionally larger box; the merged weight is spread
// back over the duplicates afterwards.
OcsvmModel train_ocsvm(const Dataset& real, const Encoder& enc, const OcsvmParams& params = {});
OcsvmModel train_ocsvm(const FeatureMatrix& x, const OcsvmParams& params = {});

std::vector<Record> ocsvm_filter(const OcsvmModel& model, const SampleBatch& batch, const Encoder& enc);

// ---- logistic discriminator ---------------------------------------------------

struct LogisticParams {
  double lambda = 1.0;
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-6;
};

struct DiscriminatorModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;

  double score(std::span<const double> x) const;
};

// Class-weighted, L2-penalized log-likelihood (maximized):
//   J(w,b) = sum_i c_i [y_i z_i - log(1 + e^{z_i})] - lambda/2 |w|^2,
//   z_i = w.x_i + b,  c_i = n / (2 n_{y_i}).
struct LogisticObjective {
  const FeatureMatrix& x;
  std::span<const int> labels;  // 1 real, 0 synthetic
  double lambda;
  std::vector<double> class_weight;  // indexed by label

  LogisticObjective(const FeatureMatrix& x, std::span<const int> labels, double lambda);
  double value(std::span<const double> w, double b) const;
  // Returns d/db; fills d/dw into grad_w.
  double gradient(std::span<const double> w, double b, std::span<double> grad_w) const;
};

DiscriminatorModel fit_logistic(const FeatureMatrix& x, std::span<const int> labels,
                                const LogisticParams& params = {});
DiscriminatorModel train_discriminator(const std::vector<Record>& real_rows,
                                       const std::vector<Record>& synth_rows, const Encoder& enc,
                                       const LogisticParams& params = {});

// Mann-Whitney: (#{pos > neg} + 1/2 #{pos == neg}) / (|pos| |neg|).
double compute_auc(std::span<const double> scores_pos, std::span<const double> scores_neg);

// ---- batch verdict ------------------------------------------------------------

struct BatchVerdict {
  std::vector<Record> s_valid;
  std::optional<double> auc;  // absent when s_valid is empty
  bool accepted = false;
  double alpha = 0.0;
};

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded 70/30 split of [0, n). n == 1 puts the item on both sides.
HoldoutSplit holdout_split(std::size_t n, Engine& eng);

BatchVerdict evaluate_batch(const Dataset& real_sub, const SampleBatch& batch,
                            const OcsvmModel& ocsvm, double alpha, const Encoder& enc,
                            std::uint64_t seed, const LogisticParams& params = {});

}  // namespace medeq
