#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medeq/dataset.hpp"
#include "medeq/encode.hpp"
#include "medeq/filter.hpp"
#include "medeq/generators.hpp"
#include "medeq/pattern.hpp"

namespace medeq {

struct EqualizerConfig {
  std::size_t tau = 150;
  std::size_t batch_size = 50;
  double alpha = 0.85;
  Strategy strategy = Strategy::Conditional;
  std::size_t max_attempts = 50;
  std::uint64_t master_seed = 0;
  // Empty means the schema's protected columns.
  std::vector<std::string> subgroup_key;
  // Append whole accepted batches instead of truncating at the gap.
  bool overshoot = false;
  double nu = 0.05;
  std::optional<double> gamma;
  int jobs = 1;

  void validate() const;
};

enum class BatchOutcome { Accepted, RejectedDistribution, RejectedAuc };
std::string_view batch_outcome_name(BatchOutcome o);

struct BatchLog {
  std::size_t attempt = 0;
  std::uint64_t sample_seed = 0;
  std::uint64_t eval_seed = 0;
  std::size_t sampled = 0;
  std::size_t valid = 0;
  std::optional<double> auc;
  BatchOutcome outcome = BatchOutcome::RejectedDistribution;
  std::size_t appended = 0;
};

enum class SubgroupStatus { Filled, Partial };

struct SubgroupLog {
  Pattern pattern;
  std::size_t initial_count = 0;
  std::size_t gap = 0;
  std::size_t attempts = 0;
  std::size_t batches_accepted = 0;
  std::size_t batches_rejected_distribution = 0;
  std::size_t batches_rejected_auc = 0;
  std::size_t final_accepted_count = 0;
  SubgroupStatus status = SubgroupStatus::Filled;
  // Rows the discriminator compared against (the subgroup itself unless it
  // has fewer than two rows).
  Pattern reference;
  std::size_t reference_rows = 0;
  bool per_subgroup_model = false;
  std::vector<BatchLog> batches;
};

struct AcceptedRecord {
  Record record;
  Pattern origin;
  bool synthetic = true;
};

struct AugmentationResult {
  Dataset augmented;
  std::vector<AcceptedRecord> accepted;
  std::vector<SubgroupLog> logs;
  EqualizerConfig config;
  std::string generator_id;
  std::vector<std::size_t> key;
  OcsvmModel ocsvm;

  bool all_filled() const;
};

std::size_t compute_gap(std::size_t tau, std::size_t subgroup_count);

std::uint64_t subgroup_seed(std::uint64_t master_seed, const Schema& schema, const Pattern& p);

// Rows used as the real side of the discriminator for `pattern`: the
// subgroup if it has at least two rows, else the nearest generalization
// (dropping bindings from the last key column backwards) that does.
Pattern reference_pattern(const Dataset& d, const Pattern& pattern,
                          const std::vector<std::size_t>& key);

struct SubgroupOutcome {
  std::vector<Record> records;
  SubgroupLog log;
};

// Generate -> filter -> accept loop for one subgroup; `g` must be fitted and
// is sampled conditioned on `pattern`.
SubgroupOutcome augment_subgroup(const Dataset& d, const Pattern& pattern, const Generator& g,
                                 const OcsvmModel& ocsvm, const Encoder& enc,
                                 const EqualizerConfig& cfg);

AugmentationResult run(const Dataset& d, Generator& g, const EqualizerConfig& cfg);

}  // namespace medeq
