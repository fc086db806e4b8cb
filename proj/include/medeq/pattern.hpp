#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medeq/dataset.hpp"

namespace medeq {

struct Binding {
  std::size_t column = 0;
  std::uint32_t value = 0;

  friend auto operator<=>(const Binding&, const Binding&) = default;
};

// Partial assignment of category codes to columns. Unbound columns act as
// wildcards. Bindings are kept sorted by column index, so the derived
// ordering is lexicographic in column order, then value order.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<Binding> bindings);

  static Pattern from_labels(const Schema& schema,
                             const std::vector<std::pair<std::string, std::string>>& labels);

  const std::vector<Binding>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }
  bool is_wildcard() const { return bindings_.empty(); }

  std::optional<std::uint32_t> bound(std::size_t column) const;
  Pattern with(std::size_t column, std::uint32_t value) const;
  Pattern without(std::size_t column) const;

  bool matches(const Record& r) const {
    for (const auto& b : bindings_)
      if (r[b.column] != b.value) return false;
    return true;
  }
  // True if every binding of `other` is also a binding here.
  bool specializes(const Pattern& other) const;
  bool binds_exactly(const std::vector<std::size_t>& columns) const;

  // Throws DataError for unknown columns or out-of-range codes.
  void validate(const Schema& schema) const;

  // "gender=Female,race=Asian"; "*" for the wildcard.
  std::string to_string(const Schema& schema) const;
  nlohmann::json to_json(const Schema& schema) const;
  static Pattern from_json(const Schema& schema, const nlohmann::json& j);

  friend auto operator<=>(const Pattern&, const Pattern&) = default;
  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  std::vector<Binding> bindings_;
};

}  // namespace medeq
