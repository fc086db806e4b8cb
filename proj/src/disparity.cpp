#include "medeq/disparity.hpp"

#include <cmath>

#include "medeq/errors.hpp"
#include "medeq/kernels.hpp"
#include "medeq/subgroups.hpp"

namespace medeq {

std::string_view tier_name(Tier t) {
  switch (t) {
    case Tier::HighlyOver: return "highly_over";
    case Tier::Over: return "over";
    case Tier::Adequate: return "adequate";
    case Tier::Under: return "under";
    case Tier::HighlyUnder: return "highly_under";
    case Tier::AbsentInReal: return "absent_in_real";
    case Tier::AbsentInSynthetic: return "absent_in_synthetic";
  }
  return "unknown";
}

Tier tier_from_name(std::string_view name) {
  for (Tier t : kAllTiers)
    if (tier_name(t) == name) return t;
  throw DataError("unknown tier '" + std::string(name) + "'");
}

namespace {

double log_in(double x, LogBase base) { return base == LogBase::Natural ? std::log(x) : std::log10(x); }

void check_proportion(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DataError(std::string(what) + " proportion " + std::to_string(p) + " outside [0, 1]");
}

}  // namespace

LogDisparity log_disparity(double p_synthetic, double p_real, LogBase base) {
  check_proportion(p_synthetic, "synthetic");
  check_proportion(p_real, "real");
  if (p_real == 0.0) return {LogDisparity::Kind::AbsentInReal, 0.0};
  if (p_synthetic == 0.0) return {LogDisparity::Kind::AbsentInSynthetic, 0.0};
  return {LogDisparity::Kind::Defined, log_in(p_synthetic / p_real, base)};
}

Tier classify_tier(double v, LogBase base) {
  const double t8 = log_in(0.8, base);
  const double t9 = log_in(0.9, base);
  if (v > -t8) return Tier::HighlyOver;
  if (v > -t9) return Tier::Over;
  if (v >= t9) return Tier::Adequate;
  if (v >= t8) return Tier::Under;
  return Tier::HighlyUnder;
}

Tier classify_tier(const LogDisparity& d, LogBase base) {
  switch (d.kind) {
    case LogDisparity::Kind::AbsentInReal: return Tier::AbsentInReal;
    case LogDisparity::Kind::AbsentInSynthetic: return Tier::AbsentInSynthetic;
    case LogDisparity::Kind::Defined: break;
  }
  return classify_tier(d.value, base);
}

DisparityRecord make_record(Pattern pattern, double p_synthetic, double p_real) {
  DisparityRecord r;
  r.pattern = std::move(pattern);
  r.p_synthetic = p_synthetic;
  r.p_real = p_real;
  r.value = log_disparity(p_synthetic, p_real);
  r.tier = classify_tier(r.value);
  return r;
}

namespace {

void check_pair(const Dataset& real, const Dataset& synthetic) {
  if (!(real.schema() == synthetic.schema()))
    throw DataError("real and synthetic datasets have different schemas");
  if (real.empty()) throw DataError("real dataset is empty");
  if (synthetic.empty()) throw DataError("synthetic dataset is empty");
}

}  // namespace

std::vector<DisparityRecord> disparity_table(const Dataset& real, const Dataset& synthetic,
                                             std::span<const std::size_t> attributes) {
  check_pair(real, synthetic);
  if (attributes.empty()) throw DataError("disparity table needs at least one attribute");
  const auto combos = full_combinations(real.schema(), attributes);
  const auto rc = kernels::group_counts(real, attributes);
  const auto sc = kernels::group_counts(synthetic, attributes);
  const double nr = static_cast<double>(real.size());
  const double ns = static_cast<double>(synthetic.size());
  std::vector<DisparityRecord> out;
  out.reserve(combos.size());
  for (std::size_t i = 0; i < combos.size(); ++i)
    out.push_back(make_record(combos[i], sc[i] / ns, rc[i] / nr));
  return out;
}

std::vector<DisparityRecord> disparity_table(const Dataset& real, const Dataset& synthetic,
                                             const std::vector<std::string>& attributes) {
  auto idx = real.schema().indices_of(attributes);
  return disparity_table(real, synthetic, idx);
}

namespace {

struct SunburstBuilder {
  const Dataset& real;
  const Dataset& synthetic;
  std::span<const std::size_t> rings;

  SunburstNode build(const Pattern& path, std::string label, std::string attribute,
                     std::size_t depth, const std::vector<std::size_t>& real_rows,
                     const std::vector<std::size_t>& synth_rows) const {
    SunburstNode node;
    node.label = std::move(label);
    node.attribute = std::move(attribute);
    node.depth = depth;
    node.record = make_record(path, static_cast<double>(synth_rows.size()) / synthetic.size(),
                              static_cast<double>(real_rows.size()) / real.size());
    if (depth == rings.size()) return node;
    const std::size_t col = rings[depth];
    const auto& spec = real.schema().column(col);
    for (std::uint32_t v = 0; v < spec.cardinality(); ++v) {
      std::vector<std::size_t> r, s;
      for (auto i : real_rows)
        if (real.rows()[i][col] == v) r.push_back(i);
      for (auto i : synth_rows)
        if (synthetic.rows()[i][col] == v) s.push_back(i);
      node.children.push_back(build(path.with(col, v), spec.values[v], spec.name, depth + 1, r, s));
    }
    return node;
  }
};

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

SunburstNode build_sunburst(const Dataset& real, const Dataset& synthetic,
                            std::span<const std::size_t> ring_order) {
  check_pair(real, synthetic);
  if (ring_order.empty()) throw DataError("sunburst needs at least one ring");
  for (auto c : ring_order)
    if (c >= real.schema().size()) throw DataError("ring references unknown column");
  SunburstBuilder b{real, synthetic, ring_order};
  return b.build(Pattern{}, "all", "", 0, iota_rows(real.size()), iota_rows(synthetic.size()));
}

SunburstNode build_sunburst(const Dataset& real, const Dataset& synthetic,
                            const std::vector<std::string>& ring_order) {
  auto idx = real.schema().indices_of(ring_order);
  return build_sunburst(real, synthetic, idx);
}

std::size_t TierHistogram::total() const {
  std::size_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::size_t TierHistogram::extremes() const {
  return (*this)[Tier::HighlyOver] + (*this)[Tier::HighlyUnder] + (*this)[Tier::AbsentInReal] +
         (*this)[Tier::AbsentInSynthetic];
}

TierHistogram tally_histogram(std::span<const DisparityRecord> table) {
  TierHistogram h;
  for (const auto& r : table) ++h[r.tier];
  return h;
}

}  // namespace medeq
