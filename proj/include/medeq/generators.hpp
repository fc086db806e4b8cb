#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "medeq/dataset.hpp"
#include "medeq/pattern.hpp"

namespace medeq {

enum class Strategy { Conditional, PerSubgroup };

std::string_view strategy_name(Strategy s);

struct SampleBatch {
  std::vector<Record> records;
  std::string origin;
  Pattern condition;  // wildcard when unconditioned
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultSmoothing = 0.5;

// fit() prepares the model; sample() draws records that conform to the
// schema and match `condition` on every bound column. Sampling is const and
// a pure function of (model, n, condition, seed).
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::string id() const = 0;
  virtual void fit(const Dataset& d) = 0;
  virtual bool fitted() const = 0;
  // Unfitted copy with the same hyperparameters, for per-subgroup training.
  virtual std::unique_ptr<Generator> fresh() const = 0;
  virtual bool supports_per_subgroup() const { return true; }

  // Validates arguments, then delegates to draw().
  SampleBatch sample(std::size_t n, std::uint64_t seed, const Pattern& condition = {}) const;

  const Schema& schema() const { return schema_; }

 protected:
  virtual std::vector<Record> draw(std::size_t n, std::uint64_t seed,
                                   const Pattern& condition) const = 0;
  void set_schema(const Schema& s) { schema_ = s; }

 private:
  Schema schema_;
};

SampleBatch sample_conditional(const Generator& g, std::size_t n, const Pattern& cond,
                               std::uint64_t seed);

// Columns drawn independently from their empirical marginals; bound columns
// are clamped.
class IndependentMarginals : public Generator {
 public:
  std::string id() const override { return "marginals"; }
  void fit(const Dataset& d) override;
  bool fitted() const override { return !marginals_.empty(); }
  std::unique_ptr<Generator> fresh() const override;

  const std::vector<std::vector<double>>& marginals() const { return marginals_; }

 protected:
  std::vector<Record> draw(std::size_t n, std::uint64_t seed, const Pattern& cond) const override;

 private:
  std::vector<std::vector<double>> marginals_;
};

// Each unbound column drawn independently from its smoothed frequency among
// the training rows that match the condition.
class ConditionalEmpirical : public Generator {
 public:
  explicit ConditionalEmpirical(double smoothing = kDefaultSmoothing) : smoothing_(smoothing) {}

  std::string id() const override { return "cond-empirical"; }
  void fit(const Dataset& d) override;
  bool fitted() const override { return data_ != nullptr; }
  std::unique_ptr<Generator> fresh() const override;

  double smoothing() const { return smoothing_; }
  // Smoothed conditional distribution of `column` given `cond`.
  std::vector<double> conditional(std::size_t column, const Pattern& cond) const;

 protected:
  std::vector<Record> draw(std::size_t n, std::uint64_t seed, const Pattern& cond) const override;

 private:
  double smoothing_;
  std::shared_ptr<const Dataset> data_;
};

// Mutual information in nats of the empirical joint of two columns, with
// `smoothing` added to every cell before normalization.
double mutual_information(const Dataset& d, std::size_t col_a, std::size_t col_b,
                          double smoothing = kDefaultSmoothing);
double mutual_information(const Dataset& d, const std::string& col_a, const std::string& col_b,
                          double smoothing = kDefaultSmoothing);

struct TreeEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0.0;
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

struct ChowLiuModel {
  std::size_t root = 0;
  std::vector<TreeEdge> edges;              // undirected, a < b
  std::vector<std::ptrdiff_t> parent;       // -1 at the root
  std::vector<std::size_t> order;           // parents before children
  std::vector<std::vector<std::size_t>> children;
  // cpt[c][parent_value][value]; the root has a single row (its marginal).
  std::vector<std::vector<std::vector<double>>> cpt;
  double smoothing = kDefaultSmoothing;

  // Joint probability of a full record under the tree factorization.
  double joint(const Record& r) const;
};

// Maximum spanning tree under pairwise mutual information (Kruskal; ties
// broken by ascending (a, b)), rooted at column 0, with smoothed CPTs.
ChowLiuModel build_chow_liu_tree(const Dataset& d, double smoothing = kDefaultSmoothing);

// Conditioning is exact: evidence on bound columns is propagated up the tree
// and values are drawn top-down from the posterior.
class ChowLiuGenerator : public Generator {
 public:
  explicit ChowLiuGenerator(double smoothing = kDefaultSmoothing) : smoothing_(smoothing) {}

  std::string id() const override { return "chowliu"; }
  void fit(const Dataset& d) override;
  bool fitted() const override { return fitted_; }
  std::unique_ptr<Generator> fresh() const override;

  const ChowLiuModel& model() const { return model_; }

 protected:
  std::vector<Record> draw(std::size_t n, std::uint64_t seed, const Pattern& cond) const override;

 private:
  double smoothing_;
  bool fitted_ = false;
  ChowLiuModel model_;
};

// Serves rows from a pre-generated synthetic CSV (output of an external
// model). Rows are consumed without replacement in file order.
class ExternalPool : public Generator {
 public:
  ExternalPool(const Schema& schema, const std::filesystem::path& pool_path);
  explicit ExternalPool(Dataset pool);

  std::string id() const override { return "external"; }
  void fit(const Dataset& d) override;
  bool fitted() const override { return true; }
  std::unique_ptr<Generator> fresh() const override;
  bool supports_per_subgroup() const override { return false; }

  std::size_t remaining(const Pattern& cond) const;

 protected:
  std::vector<Record> draw(std::size_t n, std::uint64_t seed, const Pattern& cond) const override;

 private:
  Dataset pool_;
  mutable std::mutex mutex_;
  mutable std::vector<bool> consumed_;
};

SampleBatch external_pool_sample(const ExternalPool& pool, std::size_t n, const Pattern& cond);

// Factory for the CLI names: marginals, cond-empirical, chowliu.
std::unique_ptr<Generator> make_generator(std::string_view name, double smoothing = kDefaultSmoothing);

}  // namespace medeq
