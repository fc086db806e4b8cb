#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "medeq/dataset.hpp"
#include "medeq/pattern.hpp"

namespace medeq {

struct CombinationCount {
  Pattern pattern;
  std::size_t count = 0;

  friend bool operator==(const CombinationCount&, const CombinationCount&) = default;
};

struct CoverageEntry {
  Pattern pattern;
  std::size_t count = 0;
  bool covered = false;

  friend bool operator==(const CoverageEntry&, const CoverageEntry&) = default;
};

struct CoverageReport {
  std::size_t tau = 1;
  std::vector<std::size_t> key;
  std::vector<CoverageEntry> entries;

  friend bool operator==(const CoverageReport&, const CoverageReport&) = default;
};

struct MupSet {
  std::vector<Pattern> patterns;
};

std::size_t count_matches(const Dataset& d, const Pattern& p);

// Every full pattern over `key` (cross product of the key columns' values),
// in lexicographic order: first key column most significant.
std::vector<Pattern> full_combinations(const Schema& schema, std::span<const std::size_t> key);

// Counts of all full combinations over `key`, same order as
// full_combinations. Zero-count combinations are included.
std::vector<CombinationCount> combination_counts(const Dataset& d, std::span<const std::size_t> key);

// Key defaults to the schema's protected columns.
std::vector<CombinationCount> uncovered_combinations(const Dataset& d, std::size_t tau);
std::vector<CombinationCount> uncovered_combinations(const Dataset& d, std::size_t tau,
                                                     std::span<const std::size_t> key);

CoverageReport coverage_report(const Dataset& d, std::size_t tau, std::span<const std::size_t> key);

// Breadth-first walk of the pattern lattice over `key` from the wildcard,
// expanding only covered nodes.
MupSet enumerate_mups(const Dataset& d, std::size_t tau);
MupSet enumerate_mups(const Dataset& d, std::size_t tau, std::span<const std::size_t> key);

// Greedy set cover of the MUPs by full patterns over `key`.
std::vector<Pattern> greedy_combination_selection(const MupSet& mups, const Schema& schema);
std::vector<Pattern> greedy_combination_selection(const MupSet& mups, const Schema& schema,
                                                  std::span<const std::size_t> key);

}  // namespace medeq
