#include "medeq/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "medeq/errors.hpp"
#include "medeq/pattern.hpp"
#include "medeq/rng.hpp"

namespace medeq {

std::optional<std::uint32_t> ColumnSpec::code_of(std::string_view label) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == label) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw DataError("schema must have at least one column");
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw DataError("schema column with empty name");
    if (!seen.insert(c.name).second) throw DataError("duplicate column name '" + c.name + "'");
    if (c.values.empty()) throw DataError("column '" + c.name + "' has no allowed values");
    std::set<std::string> labels(c.values.begin(), c.values.end());
    if (labels.size() != c.values.size())
      throw DataError("column '" + c.name + "' has duplicate allowed values");
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  auto i = find(name);
  if (!i) throw DataError("unknown column '" + std::string(name) + "'");
  return *i;
}

std::vector<std::size_t> Schema::indices_of(const std::vector<std::string>& names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(index_of(n));
  std::set<std::size_t> uniq(out.begin(), out.end());
  if (uniq.size() != out.size()) throw DataError("column list contains duplicates");
  return out;
}

std::vector<std::size_t> Schema::protected_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].is_protected) out.push_back(i);
  return out;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

nlohmann::json schema_to_json(const Schema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns())
    cols.push_back({{"name", c.name}, {"values", c.values}, {"protected", c.is_protected}});
  return {{"columns", cols}};
}

Schema schema_from_json(const nlohmann::json& j) {
  try {
    std::vector<ColumnSpec> cols;
    for (const auto& c : j.at("columns")) {
      ColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.values = c.at("values").get<std::vector<std::string>>();
      spec.is_protected = c.value("protected", false);
      cols.push_back(std::move(spec));
    }
    return Schema(std::move(cols));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema JSON: ") + e.what());
  }
}

Schema load_schema_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return schema_from_json(j);
}

void save_schema_json(const Schema& schema, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write schema file '" + path.string() + "'");
  out << schema_to_json(schema).dump(2) << "\n";
}

void validate_record(const Schema& schema, const Record& r) {
  if (r.size() != schema.size())
    throw DataError("record has " + std::to_string(r.size()) + " cells, schema has " +
                    std::to_string(schema.size()) + " columns");
  for (std::size_t c = 0; c < r.size(); ++c)
    if (r[c] >= schema.column(c).cardinality())
      throw DataError("category code " + std::to_string(r[c]) + " out of range for column '" +
                      schema.column(c).name + "'");
}

Dataset::Dataset(Schema schema, std::vector<Record> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  for (const auto& r : rows_) validate_record(schema_, r);
}

const std::string& Dataset::label(std::size_t row, std::size_t col) const {
  return schema_.column(col).values[rows_.at(row).at(col)];
}

Record record_from_labels(const Schema& schema, const std::vector<std::string>& labels) {
  if (labels.size() != schema.size())
    throw DataError("expected " + std::to_string(schema.size()) + " values, got " +
                    std::to_string(labels.size()));
  Record r(labels.size());
  for (std::size_t c = 0; c < labels.size(); ++c) {
    auto code = schema.column(c).code_of(labels[c]);
    if (!code)
      throw DataError("unknown category '" + labels[c] + "' in column \"" +
                      schema.column(c).name + "\"");
    r[c] = *code;
  }
  return r;
}

std::vector<std::string> record_labels(const Schema& schema, const Record& r) {
  validate_record(schema, r);
  std::vector<std::string> out;
  out.reserve(r.size());
  for (std::size_t c = 0; c < r.size(); ++c) out.push_back(schema.column(c).values[r[c]]);
  return out;
}

Dataset subset_by_pattern(const Dataset& d, const Pattern& p) {
  p.validate(d.schema());
  std::vector<Record> rows;
  for (const auto& r : d.rows())
    if (p.matches(r)) rows.push_back(r);
  return Dataset(d.schema(), std::move(rows));
}

Dataset concat(const Dataset& a, const std::vector<Record>& extra) {
  std::vector<Record> rows = a.rows();
  rows.insert(rows.end(), extra.begin(), extra.end());
  return Dataset(a.schema(), std::move(rows));
}

void validate_cohort_spec(const CohortSpec& spec) {
  if (spec.n == 0) throw DataError("cohort size must be positive");
  if (spec.marginals.size() != spec.schema.size())
    throw DataError("cohort spec has " + std::to_string(spec.marginals.size()) +
                    " marginals for " + std::to_string(spec.schema.size()) + " columns");
  for (std::size_t c = 0; c < spec.marginals.size(); ++c) {
    const auto& m = spec.marginals[c];
    const auto& col = spec.schema.column(c);
    if (m.size() != col.cardinality())
      throw DataError("marginal for column '" + col.name + "' has " + std::to_string(m.size()) +
                      " entries, column has " + std::to_string(col.cardinality()) + " categories");
    double sum = 0.0;
    for (double p : m) {
      if (!(p >= 0.0)) throw DataError("negative marginal entry in column '" + col.name + "'");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw DataError("marginal for column '" + col.name + "' does not sum to 1");
  }
}

Dataset generate_demo_cohort(const CohortSpec& spec) {
  validate_cohort_spec(spec);
  Engine eng(spec.seed);
  std::vector<Record> rows(spec.n, Record(spec.schema.size()));
  for (auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c)
      r[c] = static_cast<std::uint32_t>(sample_index(eng, spec.marginals[c]));
  return Dataset(spec.schema, std::move(rows));
}

Schema demo_schema() {
  return Schema({
      {"gender", {"Male", "Female"}, true},
      {"race", {"Asian", "Black", "White", "Other", "Unknown"}, true},
      {"age", {"<=45", "45-65", "66-80", "81+"}, true},
      {"mortality", {"Died", "Alive"}, false},
      {"insurance", {"Medicare", "Medicaid", "Private", "Self Pay", "Government"}, false},
      {"admission_type", {"elective", "urgent", "emergency", "newborn"}, false},
      {"disease", {"malignancy", "CHF", "both", "other"}, false},
  });
}

namespace {

std::vector<double> normalized(std::vector<double> percents) {
  double sum = 0.0;
  for (double p : percents) sum += p;
  for (double& p : percents) p /= sum;
  return percents;
}

std::vector<double> uniform(std::size_t k) { return std::vector<double>(k, 1.0 / k); }

}  // namespace

CohortSpec demo_cohort_spec(std::size_t n, std::uint64_t seed) {
  CohortSpec spec;
  spec.schema = demo_schema();
  spec.n = n;
  spec.seed = seed;
  spec.marginals = {
      normalized({56.6, 43.4}),
      // published race percentages sum to 99.99
      normalized({2.37, 7.64, 71.23, 3.53, 15.22}),
      normalized({15.45, 33.61, 30.85, 20.09}),
      normalized({40.57, 59.43}),
      uniform(5),
      uniform(4),
      uniform(4),
  };
  return spec;
}

}  // namespace medeq
