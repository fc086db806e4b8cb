#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace medeq {

class Pattern;

// One category code per column; codes index ColumnSpec::values.
using Record = std::vector<std::uint32_t>;

struct ColumnSpec {
  std::string name;
  std::vector<std::string> values;  // order defines the one-hot layout
  bool is_protected = false;

  std::size_t cardinality() const { return values.size(); }
  std::optional<std::uint32_t> code_of(std::string_view label) const;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  const ColumnSpec& column(std::size_t i) const { return columns_.at(i); }
  std::size_t size() const { return columns_.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws DataError naming the column when absent.
  std::size_t index_of(std::string_view name) const;
  std::vector<std::size_t> indices_of(const std::vector<std::string>& names) const;

  std::vector<std::size_t> protected_columns() const;
  std::vector<std::string> names() const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<ColumnSpec> columns_;
};

nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);
Schema load_schema_json(const std::filesystem::path& path);
void save_schema_json(const Schema& schema, const std::filesystem::path& path);

// Immutable after construction; every cell is validated against the schema.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema, std::vector<Record> rows = {});

  const Schema& schema() const { return schema_; }
  const std::vector<Record>& rows() const { return rows_; }
  const Record& row(std::size_t i) const { return rows_.at(i); }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  const std::string& label(std::size_t row, std::size_t col) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Schema schema_;
  std::vector<Record> rows_;
};

// Throws DataError if the record does not fit the schema.
void validate_record(const Schema& schema, const Record& r);
Record record_from_labels(const Schema& schema, const std::vector<std::string>& labels);
std::vector<std::string> record_labels(const Schema& schema, const Record& r);

Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
void save_csv(const Dataset& d, const std::filesystem::path& path);
Dataset parse_csv(std::string_view text, const Schema& schema);
std::string format_csv(const Dataset& d);

Dataset subset_by_pattern(const Dataset& d, const Pattern& p);
Dataset concat(const Dataset& a, const std::vector<Record>& extra);

struct CohortSpec {
  Schema schema;
  std::size_t n = 0;
  std::vector<std::vector<double>> marginals;  // aligned with schema columns
  std::uint64_t seed = 0;
};

void validate_cohort_spec(const CohortSpec& spec);
Dataset generate_demo_cohort(const CohortSpec& spec);

// gender, race, age (protected) plus mortality, insurance, admission_type,
// disease.
Schema demo_schema();
// Published cohort marginals for gender, race, age and mortality; uniform
// for the remaining columns.
CohortSpec demo_cohort_spec(std::size_t n, std::uint64_t seed);

}  // namespace medeq
