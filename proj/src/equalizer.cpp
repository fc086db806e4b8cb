#include "medeq/equalizer.hpp"

#include <exception>

#include <omp.h>

#include "medeq/errors.hpp"
#include "medeq/rng.hpp"
#include "medeq/subgroups.hpp"

namespace medeq {

void EqualizerConfig::validate() const {
  if (tau < 1) throw DataError("tau must be at least 1");
  if (batch_size < 1) throw DataError("batch size must be at least 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in (0, 1]");
  if (max_attempts < 1) throw DataError("max attempts must be at least 1");
  if (!(nu > 0.0 && nu <= 1.0)) throw DataError("nu must lie in (0, 1]");
  if (gamma && !(*gamma > 0.0)) throw DataError("gamma must be positive");
  if (jobs < 1) throw DataError("jobs must be at least 1");
}

std::string_view batch_outcome_name(BatchOutcome o) {
  switch (o) {
    case BatchOutcome::Accepted: return "accepted";
    case BatchOutcome::RejectedDistribution: return "rejected_distribution";
    case BatchOutcome::RejectedAuc: return "rejected_auc";
  }
  return "unknown";
}

bool AugmentationResult::all_filled() const {
  for (const auto& l : logs)
    if (l.status != SubgroupStatus::Filled) return false;
  return true;
}

std::size_t compute_gap(std::size_t tau, std::size_t subgroup_count) {
  return subgroup_count >= tau ? 0 : tau - subgroup_count;
}

std::uint64_t subgroup_seed(std::uint64_t master_seed, const Schema& schema, const Pattern& p) {
  return mix_seed(master_seed, hash_string(p.to_string(schema)));
}

Pattern reference_pattern(const Dataset& d, const Pattern& pattern,
                          const std::vector<std::size_t>& key) {
  Pattern ref = pattern;
  if (count_matches(d, ref) >= 2) return ref;
  for (std::size_t k = key.size(); k-- > 0;) {
    ref = ref.without(key[k]);
    if (count_matches(d, ref) >= 2) return ref;
  }
  return ref;
}

namespace {

std::vector<std::size_t> resolve_key(const Schema& schema, const EqualizerConfig& cfg) {
  auto key = cfg.subgroup_key.empty() ? schema.protected_columns() : schema.indices_of(cfg.subgroup_key);
  if (key.empty()) throw DataError("no protected columns to define subgroups");
  return key;
}

}  // namespace

SubgroupOutcome augment_subgroup(const Dataset& d, const Pattern& pattern, const Generator& g,
                                 const OcsvmModel& ocsvm, const Encoder& enc,
                                 const EqualizerConfig& cfg) {
  const auto& schema = d.schema();
  const auto key = resolve_key(schema, cfg);
  SubgroupOutcome out;
  auto& log = out.log;
  log.pattern = pattern;
  log.initial_count = count_matches(d, pattern);
  log.gap = compute_gap(cfg.tau, log.initial_count);
  if (log.gap == 0) {
    log.status = SubgroupStatus::Filled;
    log.reference = pattern;
    return out;
  }
  log.reference = reference_pattern(d, pattern, key);
  const Dataset reference = subset_by_pattern(d, log.reference);
  log.reference_rows = reference.size();

  const std::uint64_t seed = subgroup_seed(cfg.master_seed, schema, pattern);
  try {
    for (std::size_t attempt = 0; attempt < cfg.max_attempts && out.records.size() < log.gap; ++attempt) {
      BatchLog b;
      b.attempt = attempt;
      b.sample_seed = mix_seed(seed, 2 * attempt);
      b.eval_seed = mix_seed(seed, 2 * attempt + 1);
      const SampleBatch batch = g.sample(cfg.batch_size, b.sample_seed, pattern);
      BatchVerdict verdict = evaluate_batch(reference, batch, ocsvm, cfg.alpha, enc, b.eval_seed);
      b.sampled = batch.records.size();
      b.valid = verdict.s_valid.size();
      b.auc = verdict.auc;
      ++log.attempts;
      if (verdict.s_valid.empty()) {
        b.outcome = BatchOutcome::RejectedDistribution;
        ++log.batches_rejected_distribution;
      } else if (!verdict.accepted) {
        b.outcome = BatchOutcome::RejectedAuc;
        ++log.batches_rejected_auc;
      } else {
        b.outcome = BatchOutcome::Accepted;
        ++log.batches_accepted;
        std::size_t take = verdict.s_valid.size();
        if (!cfg.overshoot) take = std::min(take, log.gap - out.records.size());
        for (std::size_t i = 0; i < take; ++i) out.records.push_back(std::move(verdict.s_valid[i]));
        b.appended = take;
      }
      log.batches.push_back(b);
    }
  } catch (const SolverError& e) {
    throw SolverError("subgroup " + pattern.to_string(schema) + ": " + e.what());
  } catch (const PoolExhausted& e) {
    throw PoolExhausted("subgroup " + pattern.to_string(schema) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("subgroup " + pattern.to_string(schema) + ": " + e.what());
  }
  log.final_accepted_count = out.records.size();
  log.status = out.records.size() >= log.gap ? SubgroupStatus::Filled : SubgroupStatus::Partial;
  return out;
}

AugmentationResult run(const Dataset& d, Generator& g, const EqualizerConfig& cfg) {
  cfg.validate();
  if (d.empty()) throw DataError("real dataset is empty");
  const auto& schema = d.schema();
  const auto key = resolve_key(schema, cfg);
  if (cfg.strategy == Strategy::PerSubgroup && !g.supports_per_subgroup())
    throw DataError("generator '" + g.id() + "' does not support the per-subgroup strategy");

  AugmentationResult result;
  result.config = cfg;
  result.generator_id = g.id();
  result.key = key;

  const auto targets = uncovered_combinations(d, cfg.tau, key);
  const Encoder enc(schema);
  if (targets.empty()) {
    result.augmented = d;
    return result;
  }

  OcsvmParams op;
  op.nu = cfg.nu;
  op.gamma = cfg.gamma;
  result.ocsvm = train_ocsvm(d, enc, op);
  g.fit(d);

  const auto n = static_cast<std::ptrdiff_t>(targets.size());
  std::vector<SubgroupOutcome> outcomes(targets.size());
  std::vector<std::exception_ptr> errors(targets.size());
  const Generator& global = g;

#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const Pattern& p = targets[i].pattern;
      const Generator* use = &global;
      std::unique_ptr<Generator> local;
      if (cfg.strategy == Strategy::PerSubgroup && targets[i].count >= 2) {
        local = global.fresh();
        local->fit(subset_by_pattern(d, p));
        use = local.get();
      }
      outcomes[i] = augment_subgroup(d, p, *use, result.ocsvm, enc, cfg);
      outcomes[i].log.per_subgroup_model = local != nullptr;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Record> extra;
  for (auto& o : outcomes) {
    for (auto& r : o.records) {
      result.accepted.push_back({r, o.log.pattern, true});
      extra.push_back(std::move(r));
    }
    result.logs.push_back(std::move(o.log));
  }
  result.augmented = concat(d, extra);
  return result;
}

}  // namespace medeq
