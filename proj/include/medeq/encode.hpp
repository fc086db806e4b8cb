#pragma once

#include <string>
#include <utility>
#include <vector>

#include "medeq/dataset.hpp"
#include "medeq/kernels.hpp"

namespace medeq {

using FeatureVector = std::vector<double>;

// Full one-hot layout: columns in schema order, categories in allowed-value
// order, no reference category dropped.
class Encoder {
 public:
  explicit Encoder(const Schema& schema);

  const Schema& schema() const { return schema_; }
  const std::vector<std::pair<std::string, std::string>>& layout() const { return layout_; }
  std::size_t dimension() const { return layout_.size(); }
  std::size_t offset(std::size_t column) const { return offsets_.at(column); }

  FeatureVector encode(const Record& r) const;
  void encode_into(const Record& r, std::span<double> out) const;
  FeatureMatrix encode_all(const std::vector<Record>& rows) const;

 private:
  Schema schema_;
  std::vector<std::pair<std::string, std::string>> layout_;
  std::vector<std::size_t> offsets_;
};

inline Encoder fit_encoder(const Schema& schema) { return Encoder(schema); }

}  // namespace medeq
