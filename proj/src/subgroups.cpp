#include "medeq/subgroups.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "medeq/errors.hpp"
#include "medeq/kernels.hpp"

namespace medeq {

Pattern::Pattern(std::vector<Binding> bindings) : bindings_(std::move(bindings)) {
  std::sort(bindings_.begin(), bindings_.end());
  for (std::size_t i = 1; i < bindings_.size(); ++i)
    if (bindings_[i].column == bindings_[i - 1].column)
      throw DataError("pattern binds column " + std::to_string(bindings_[i].column) + " twice");
}

Pattern Pattern::from_labels(const Schema& schema,
                             const std::vector<std::pair<std::string, std::string>>& labels) {
  std::vector<Binding> b;
  for (const auto& [name, label] : labels) {
    const std::size_t col = schema.index_of(name);
    auto code = schema.column(col).code_of(label);
    if (!code) throw DataError("unknown category '" + label + "' for column '" + name + "'");
    b.push_back({col, *code});
  }
  return Pattern(std::move(b));
}

std::optional<std::uint32_t> Pattern::bound(std::size_t column) const {
  for (const auto& b : bindings_)
    if (b.column == column) return b.value;
  return std::nullopt;
}

Pattern Pattern::with(std::size_t column, std::uint32_t value) const {
  auto b = bindings_;
  for (auto& x : b)
    if (x.column == column) {
      x.value = value;
      return Pattern(std::move(b));
    }
  b.push_back({column, value});
  return Pattern(std::move(b));
}

Pattern Pattern::without(std::size_t column) const {
  auto b = bindings_;
  std::erase_if(b, [&](const Binding& x) { return x.column == column; });
  return Pattern(std::move(b));
}

bool Pattern::specializes(const Pattern& other) const {
  for (const auto& b : other.bindings_) {
    auto v = bound(b.column);
    if (!v || *v != b.value) return false;
  }
  return true;
}

bool Pattern::binds_exactly(const std::vector<std::size_t>& columns) const {
  if (columns.size() != bindings_.size()) return false;
  for (auto c : columns)
    if (!bound(c)) return false;
  return true;
}

void Pattern::validate(const Schema& schema) const {
  for (const auto& b : bindings_) {
    if (b.column >= schema.size())
      throw DataError("pattern references unknown column " + std::to_string(b.column));
    if (b.value >= schema.column(b.column).cardinality())
      throw DataError("pattern value out of range for column '" + schema.column(b.column).name +
                      "'");
  }
}

std::string Pattern::to_string(const Schema& schema) const {
  if (bindings_.empty()) return "*";
  std::string s;
  for (const auto& b : bindings_) {
    if (!s.empty()) s += ",";
    const auto& col = schema.column(b.column);
    s += col.name + "=" + col.values.at(b.value);
  }
  return s;
}

nlohmann::json Pattern::to_json(const Schema& schema) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& b : bindings_) {
    const auto& col = schema.column(b.column);
    j[col.name] = col.values.at(b.value);
  }
  return j;
}

Pattern Pattern::from_json(const Schema& schema, const nlohmann::json& j) {
  std::vector<std::pair<std::string, std::string>> labels;
  for (auto it = j.begin(); it != j.end(); ++it)
    labels.emplace_back(it.key(), it.value().get<std::string>());
  return from_labels(schema, labels);
}

std::size_t count_matches(const Dataset& d, const Pattern& p) {
  p.validate(d.schema());
  std::size_t n = 0;
  for (const auto& r : d.rows())
    if (p.matches(r)) ++n;
  return n;
}

namespace {

void check_key(const Schema& schema, std::span<const std::size_t> key) {
  if (key.empty()) throw DataError("no protected columns to form subgroups over");
  std::set<std::size_t> seen;
  for (auto c : key) {
    if (c >= schema.size()) throw DataError("key references unknown column");
    if (!seen.insert(c).second) throw DataError("key lists a column twice");
  }
}

std::vector<std::size_t> protected_key(const Schema& schema) {
  auto key = schema.protected_columns();
  if (key.empty()) throw DataError("schema has no protected columns");
  return key;
}

}  // namespace

std::vector<Pattern> full_combinations(const Schema& schema, std::span<const std::size_t> key) {
  check_key(schema, key);
  std::size_t total = 1;
  for (auto c : key) total *= schema.column(c).cardinality();
  std::vector<Pattern> out;
  out.reserve(total);
  std::vector<std::uint32_t> digits(key.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<Binding> b;
    for (std::size_t k = 0; k < key.size(); ++k) b.push_back({key[k], digits[k]});
    out.emplace_back(std::move(b));
    for (std::size_t k = key.size(); k-- > 0;) {
      if (++digits[k] < schema.column(key[k]).cardinality()) break;
      digits[k] = 0;
    }
  }
  return out;
}

std::vector<CombinationCount> combination_counts(const Dataset& d, std::span<const std::size_t> key) {
  auto combos = full_combinations(d.schema(), key);
  auto counts = kernels::group_counts(d, key);
  std::vector<CombinationCount> out;
  out.reserve(combos.size());
  for (std::size_t i = 0; i < combos.size(); ++i) out.push_back({std::move(combos[i]), counts[i]});
  return out;
}

std::vector<CombinationCount> uncovered_combinations(const Dataset& d, std::size_t tau) {
  auto key = protected_key(d.schema());
  return uncovered_combinations(d, tau, key);
}

std::vector<CombinationCount> uncovered_combinations(const Dataset& d, std::size_t tau,
                                                     std::span<const std::size_t> key) {
  if (tau < 1) throw DataError("coverage threshold must be at least 1");
  auto all = combination_counts(d, key);
  std::vector<CombinationCount> out;
  for (auto& c : all)
    if (c.count < tau) out.push_back(std::move(c));
  return out;
}

CoverageReport coverage_report(const Dataset& d, std::size_t tau, std::span<const std::size_t> key) {
  if (tau < 1) throw DataError("coverage threshold must be at least 1");
  CoverageReport rep;
  rep.tau = tau;
  rep.key.assign(key.begin(), key.end());
  for (auto& c : combination_counts(d, key))
    rep.entries.push_back({std::move(c.pattern), c.count, c.count >= tau});
  return rep;
}

MupSet enumerate_mups(const Dataset& d, std::size_t tau) {
  auto key = protected_key(d.schema());
  return enumerate_mups(d, tau, key);
}

MupSet enumerate_mups(const Dataset& d, std::size_t tau, std::span<const std::size_t> key) {
  if (tau < 1) throw DataError("coverage threshold must be at least 1");
  check_key(d.schema(), key);
  const auto& schema = d.schema();

  // Row index lists per node keep counting proportional to the node's support.
  struct Node {
    Pattern pattern;
    std::vector<std::size_t> rows;
  };
  std::set<Pattern> visited;
  std::set<Pattern> uncovered_seen;
  std::vector<Pattern> mups;
  std::deque<Node> queue;

  std::vector<std::size_t> all(d.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  queue.push_back({Pattern{}, std::move(all)});
  visited.insert(Pattern{});

  auto is_covered = [&](const Pattern& p) { return count_matches(d, p) >= tau; };

  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    if (node.rows.size() < tau) {
      // Uncovered: maximal iff every one-binding generalization is covered.
      bool maximal = true;
      for (const auto& b : node.pattern.bindings()) {
        Pattern parent = node.pattern.without(b.column);
        if (uncovered_seen.count(parent) || !is_covered(parent)) {
          maximal = false;
          break;
        }
      }
      uncovered_seen.insert(node.pattern);
      if (maximal) mups.push_back(node.pattern);
      continue;
    }
    for (auto col : key) {
      if (node.pattern.bound(col)) continue;
      for (std::uint32_t v = 0; v < schema.column(col).cardinality(); ++v) {
        Pattern child = node.pattern.with(col, v);
        if (!visited.insert(child).second) continue;
        std::vector<std::size_t> rows;
        for (auto r : node.rows)
          if (d.rows()[r][col] == v) rows.push_back(r);
        queue.push_back({std::move(child), std::move(rows)});
      }
    }
  }
  std::sort(mups.begin(), mups.end());
  return {std::move(mups)};
}

std::vector<Pattern> greedy_combination_selection(const MupSet& mups, const Schema& schema) {
  auto key = protected_key(schema);
  return greedy_combination_selection(mups, schema, key);
}

std::vector<Pattern> greedy_combination_selection(const MupSet& mups, const Schema& schema,
                                                  std::span<const std::size_t> key) {
  if (mups.patterns.empty()) throw DataError("no uncovered patterns to select combinations for");
  for (const auto& m : mups.patterns) {
    m.validate(schema);
    for (const auto& b : m.bindings())
      if (std::find(key.begin(), key.end(), b.column) == key.end())
        throw DataError("uncovered pattern binds a column outside the subgroup key");
  }
  const auto candidates = full_combinations(schema, key);
  std::vector<bool> remaining(mups.patterns.size(), true);
  std::size_t left = mups.patterns.size();
  std::vector<Pattern> chosen;
  while (left > 0) {
    std::size_t best = 0, best_hits = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::size_t hits = 0;
      for (std::size_t m = 0; m < mups.patterns.size(); ++m)
        if (remaining[m] && candidates[c].specializes(mups.patterns[m])) ++hits;
      // strict > keeps the lexicographically first candidate on ties
      if (hits > best_hits) {
        best_hits = hits;
        best = c;
      }
    }
    for (std::size_t m = 0; m < mups.patterns.size(); ++m)
      if (remaining[m] && candidates[best].specializes(mups.patterns[m])) {
        remaining[m] = false;
        --left;
      }
    chosen.push_back(candidates[best]);
  }
  return chosen;
}

}  // namespace medeq
