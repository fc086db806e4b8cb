#include "medeq/encode.hpp"

#include <algorithm>

#include "medeq/errors.hpp"

namespace medeq {

Encoder::Encoder(const Schema& schema) : schema_(schema) {
  for (const auto& col : schema_.columns()) {
    offsets_.push_back(layout_.size());
    for (const auto& v : col.values) layout_.emplace_back(col.name, v);
  }
}

void Encoder::encode_into(const Record& r, std::span<double> out) const {
  if (r.size() != schema_.size()) throw DataError("record width does not match encoder schema");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < r.size(); ++c) {
    if (r[c] >= schema_.column(c).cardinality())
      throw DataError("unknown category code in column '" + schema_.column(c).name + "'");
    out[offsets_[c] + r[c]] = 1.0;
  }
}

FeatureVector Encoder::encode(const Record& r) const {
  FeatureVector v(dimension());
  encode_into(r, v);
  return v;
}

FeatureMatrix Encoder::encode_all(const std::vector<Record>& rows) const {
  FeatureMatrix m(rows.size(), dimension());
  for (std::size_t i = 0; i < rows.size(); ++i) encode_into(rows[i], m.row(i));
  return m;
}

}  // namespace medeq
