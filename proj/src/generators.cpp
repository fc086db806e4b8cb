#include "medeq/generators.hpp"

#include "medeq/errors.hpp"
#include "medeq/rng.hpp"

namespace medeq {

std::string_view strategy_name(Strategy s) {
  return s == Strategy::Conditional ? "conditional" : "per-subgroup";
}

SampleBatch Generator::sample(std::size_t n, std::uint64_t seed, const Pattern& condition) const {
  if (!fitted()) throw DataError("generator '" + id() + "' sampled before fit");
  if (n < 1) throw DataError("sample size must be at least 1");
  condition.validate(schema_);
  SampleBatch batch;
  batch.records = draw(n, seed, condition);
  batch.origin = id();
  batch.condition = condition;
  batch.seed = seed;
  return batch;
}

SampleBatch sample_conditional(const Generator& g, std::size_t n, const Pattern& cond,
                               std::uint64_t seed) {
  return g.sample(n, seed, cond);
}

// ---------------------------------------------------------------------------

void IndependentMarginals::fit(const Dataset& d) {
  if (d.empty()) throw DataError("cannot fit generator on an empty dataset");
  set_schema(d.schema());
  marginals_.assign(d.schema().size(), {});
  for (std::size_t c = 0; c < d.schema().size(); ++c)
    marginals_[c].assign(d.schema().column(c).cardinality(), 0.0);
  for (const auto& r : d.rows())
    for (std::size_t c = 0; c < r.size(); ++c) marginals_[c][r[c]] += 1.0;
  for (auto& m : marginals_)
    for (double& p : m) p /= static_cast<double>(d.size());
}

std::unique_ptr<Generator> IndependentMarginals::fresh() const {
  return std::make_unique<IndependentMarginals>();
}

std::vector<Record> IndependentMarginals::draw(std::size_t n, std::uint64_t seed,
                                               const Pattern& cond) const {
  Engine eng(seed);
  std::vector<Record> out(n, Record(marginals_.size()));
  for (auto& r : out)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (auto v = cond.bound(c)) {
        r[c] = *v;
        continue;
      }
      r[c] = static_cast<std::uint32_t>(sample_index(eng, marginals_[c]));
    }
  return out;
}

// ---------------------------------------------------------------------------

void ConditionalEmpirical::fit(const Dataset& d) {
  if (d.empty()) throw DataError("cannot fit generator on an empty dataset");
  if (smoothing_ < 0.0) throw DataError("smoothing must be non-negative");
  set_schema(d.schema());
  data_ = std::make_shared<const Dataset>(d);
}

std::unique_ptr<Generator> ConditionalEmpirical::fresh() const {
  return std::make_unique<ConditionalEmpirical>(smoothing_);
}

std::vector<double> ConditionalEmpirical::conditional(std::size_t column, const Pattern& cond) const {
  const auto& schema = data_->schema();
  std::vector<double> w(schema.column(column).cardinality(), smoothing_);
  double total = smoothing_ * static_cast<double>(w.size());
  for (const auto& r : data_->rows())
    if (cond.matches(r)) {
      w[r[column]] += 1.0;
      total += 1.0;
    }
  if (!(total > 0.0))
    throw DataError("no training rows match " + cond.to_string(schema) +
                    " and smoothing is off; column '" + schema.column(column).name +
                    "' has no observed categories");
  for (double& p : w) p /= total;
  return w;
}

std::vector<Record> ConditionalEmpirical::draw(std::size_t n, std::uint64_t seed,
                                               const Pattern& cond) const {
  const std::size_t width = data_->schema().size();
  std::vector<std::vector<double>> dist(width);
  for (std::size_t c = 0; c < width; ++c)
    if (!cond.bound(c)) dist[c] = conditional(c, cond);
  Engine eng(seed);
  std::vector<Record> out(n, Record(width));
  for (auto& r : out)
    for (std::size_t c = 0; c < width; ++c) {
      if (auto v = cond.bound(c)) {
        r[c] = *v;
        continue;
      }
      r[c] = static_cast<std::uint32_t>(sample_index(eng, dist[c]));
    }
  return out;
}

// ---------------------------------------------------------------------------

ExternalPool::ExternalPool(const Schema& schema, const std::filesystem::path& pool_path)
    : ExternalPool(load_csv(pool_path, schema)) {}

ExternalPool::ExternalPool(Dataset pool) : pool_(std::move(pool)), consumed_(pool_.size(), false) {
  set_schema(pool_.schema());
}

void ExternalPool::fit(const Dataset& d) {
  if (!(d.schema() == pool_.schema()))
    throw DataError("external pool schema does not match the real dataset schema");
}

std::unique_ptr<Generator> ExternalPool::fresh() const {
  throw DataError("an external pool cannot be retrained per subgroup");
}

std::size_t ExternalPool::remaining(const Pattern& cond) const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (std::size_t i = 0; i < pool_.size(); ++i)
    if (!consumed_[i] && cond.matches(pool_.rows()[i])) ++n;
  return n;
}

std::vector<Record> ExternalPool::draw(std::size_t n, std::uint64_t, const Pattern& cond) const {
  std::lock_guard lock(mutex_);
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < pool_.size() && picked.size() < n; ++i)
    if (!consumed_[i] && cond.matches(pool_.rows()[i])) picked.push_back(i);
  if (picked.size() < n)
    throw PoolExhausted("external pool exhausted for pattern " + cond.to_string(pool_.schema()) +
                        ": " + std::to_string(picked.size()) + " of " + std::to_string(n) +
                        " rows left");
  std::vector<Record> out;
  out.reserve(n);
  for (auto i : picked) {
    consumed_[i] = true;
    out.push_back(pool_.rows()[i]);
  }
  return out;
}

SampleBatch external_pool_sample(const ExternalPool& pool, std::size_t n, const Pattern& cond) {
  return pool.sample(n, 0, cond);
}

std::unique_ptr<Generator> make_generator(std::string_view name, double smoothing) {
  if (name == "marginals") return std::make_unique<IndependentMarginals>();
  if (name == "cond-empirical") return std::make_unique<ConditionalEmpirical>(smoothing);
  if (name == "chowliu") return std::make_unique<ChowLiuGenerator>(smoothing);
  throw DataError("unknown generator '" + std::string(name) + "'");
}

}  // namespace medeq
