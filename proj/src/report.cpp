#include "medeq/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "medeq/errors.hpp"

namespace medeq {

using nlohmann::json;

double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("I/O failure writing '" + path.string() + "'");
}

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

json record_to_json(const DisparityRecord& r, const Schema& schema) {
  json j;
  j["pattern"] = r.pattern.to_json(schema);
  j["p_real"] = r.p_real;
  j["p_synthetic"] = r.p_synthetic;
  j["tier"] = std::string(tier_name(r.tier));
  j["value"] = r.value.defined() ? json(round6(r.value.value)) : json(nullptr);
  return j;
}

DisparityRecord record_from_json(const json& j, const Schema& schema) {
  DisparityRecord r;
  r.pattern = Pattern::from_json(schema, j.at("pattern"));
  r.p_real = j.at("p_real").get<double>();
  r.p_synthetic = j.at("p_synthetic").get<double>();
  r.tier = tier_from_name(j.at("tier").get<std::string>());
  if (r.tier == Tier::AbsentInReal) {
    r.value = {LogDisparity::Kind::AbsentInReal, 0.0};
  } else if (r.tier == Tier::AbsentInSynthetic) {
    r.value = {LogDisparity::Kind::AbsentInSynthetic, 0.0};
  } else {
    r.value = {LogDisparity::Kind::Defined, j.at("value").get<double>()};
  }
  return r;
}

json histogram_to_json(const TierHistogram& h) {
  json j = json::object();
  for (Tier t : kAllTiers) j[std::string(tier_name(t))] = h[t];
  return j;
}

TierHistogram histogram_from_json(const json& j) {
  TierHistogram h;
  for (Tier t : kAllTiers) h[t] = j.at(std::string(tier_name(t))).get<std::size_t>();
  return h;
}

json node_to_json(const SunburstNode& n, const Schema& schema) {
  json j;
  j["label"] = n.label;
  j["attribute"] = n.attribute;
  j["depth"] = n.depth;
  j["record"] = record_to_json(n.record, schema);
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(node_to_json(c, schema));
  return j;
}

SunburstNode node_from_json(const json& j, const Schema& schema) {
  SunburstNode n;
  n.label = j.at("label").get<std::string>();
  n.attribute = j.at("attribute").get<std::string>();
  n.depth = j.at("depth").get<std::size_t>();
  n.record = record_from_json(j.at("record"), schema);
  for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c, schema));
  return n;
}

std::vector<std::string> names_of(const Schema& schema, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(schema.column(i).name);
  return out;
}

}  // namespace

json coverage_to_json(const CoverageReport& c, const Schema& schema) {
  json j;
  j["tau"] = c.tau;
  j["key"] = names_of(schema, c.key);
  j["entries"] = json::array();
  for (const auto& e : c.entries)
    j["entries"].push_back({{"pattern", e.pattern.to_json(schema)}, {"count", e.count}, {"covered", e.covered}});
  return j;
}

AuditReport build_audit(const Dataset& real, const Dataset& synthetic, const AuditOptions& opts) {
  AuditReport r;
  r.schema = real.schema();
  r.attributes = opts.attributes;
  r.ring_order = opts.ring_order;
  const auto attrs = real.schema().indices_of(opts.attributes);
  r.table = disparity_table(real, synthetic, attrs);
  r.histogram = tally_histogram(r.table);
  r.sunburst = build_sunburst(real, synthetic, opts.ring_order);
  r.coverage = coverage_report(real, opts.tau, attrs);
  r.metadata = {
      {"tool_version", kToolVersion},
      {"real_id", opts.real_id},
      {"synthetic_id", opts.synthetic_id},
      {"real_rows", real.size()},
      {"synthetic_rows", synthetic.size()},
      {"log_base", "e"},
      {"config", opts.config},
  };
  return r;
}

json audit_to_json(const AuditReport& r) {
  json j;
  j["schema"] = schema_to_json(r.schema);
  j["metadata"] = r.metadata;
  j["attributes"] = r.attributes;
  j["ring_order"] = r.ring_order;
  j["table"] = json::array();
  for (const auto& rec : r.table) j["table"].push_back(record_to_json(rec, r.schema));
  j["histogram"] = histogram_to_json(r.histogram);
  j["sunburst"] = node_to_json(r.sunburst, r.schema);
  j["coverage"] = coverage_to_json(r.coverage, r.schema);
  return j;
}

AuditReport audit_from_json(const json& j) {
  try {
    AuditReport r;
    r.schema = schema_from_json(j.at("schema"));
    r.metadata = j.at("metadata");
    r.attributes = j.at("attributes").get<std::vector<std::string>>();
    r.ring_order = j.at("ring_order").get<std::vector<std::string>>();
    for (const auto& rec : j.at("table")) r.table.push_back(record_from_json(rec, r.schema));
    r.histogram = histogram_from_json(j.at("histogram"));
    r.sunburst = node_from_json(j.at("sunburst"), r.schema);
    const auto& cov = j.at("coverage");
    r.coverage.tau = cov.at("tau").get<std::size_t>();
    r.coverage.key = r.schema.indices_of(cov.at("key").get<std::vector<std::string>>());
    for (const auto& e : cov.at("entries"))
      r.coverage.entries.push_back({Pattern::from_json(r.schema, e.at("pattern")),
                                    e.at("count").get<std::size_t>(), e.at("covered").get<bool>()});
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed audit report: ") + e.what());
  }
}

void emit_audit_json(const AuditReport& r, const std::filesystem::path& path) {
  write_text(path, canonical_dump(audit_to_json(r)));
}

AuditReport read_audit_json(const std::filesystem::path& path) {
  return audit_from_json(read_json_file(path));
}

ComparisonReport compare_reports(const AuditReport& before, const AuditReport& after) {
  if (before.attributes != after.attributes)
    throw DataError("reports cover different attribute sets");
  if (before.table.size() != after.table.size())
    throw DataError("reports cover different subgroup sets");
  std::map<Pattern, Tier> after_tiers;
  for (const auto& r : after.table) after_tiers[r.pattern] = r.tier;

  ComparisonReport c;
  c.schema = before.schema;
  c.attributes = before.attributes;
  c.before = tally_histogram(before.table);
  c.after = tally_histogram(after.table);
  for (const auto& r : before.table) {
    auto it = after_tiers.find(r.pattern);
    if (it == after_tiers.end())
      throw DataError("subgroup " + r.pattern.to_string(before.schema) + " missing from the after report");
    if (it->second != r.tier) c.transitions.push_back({r.pattern, r.tier, it->second});
  }
  return c;
}

json comparison_to_json(const ComparisonReport& c) {
  json j;
  j["attributes"] = c.attributes;
  j["before"] = histogram_to_json(c.before);
  j["after"] = histogram_to_json(c.after);
  json delta = json::object();
  for (Tier t : kAllTiers) delta[std::string(tier_name(t))] = c.delta(t);
  j["delta"] = delta;
  j["transitions"] = json::array();
  for (const auto& t : c.transitions)
    j["transitions"].push_back({{"pattern", t.pattern.to_json(c.schema)},
                                {"from", std::string(tier_name(t.from))},
                                {"to", std::string(tier_name(t.to))}});
  j["tool_version"] = kToolVersion;
  return j;
}

json augmentation_log_json(const AugmentationResult& r, const Schema& schema) {
  const auto& cfg = r.config;
  json config = {
      {"tau", cfg.tau},
      {"batch_size", cfg.batch_size},
      {"alpha", cfg.alpha},
      {"strategy", std::string(strategy_name(cfg.strategy))},
      {"max_attempts", cfg.max_attempts},
      {"master_seed", cfg.master_seed},
      {"subgroup_key", names_of(schema, r.key)},
      {"overshoot", cfg.overshoot},
      {"nu", cfg.nu},
      {"gamma", cfg.gamma ? json(*cfg.gamma) : json("auto")},
      {"generator", r.generator_id},
  };

  json subgroups = json::array();
  json partial = json::array();
  std::size_t filled = 0;
  for (const auto& l : r.logs) {
    json batches = json::array();
    for (const auto& b : l.batches)
      batches.push_back({{"attempt", b.attempt},
                         {"sample_seed", b.sample_seed},
                         {"eval_seed", b.eval_seed},
                         {"sampled", b.sampled},
                         {"valid", b.valid},
                         {"auc", b.auc ? json(*b.auc) : json(nullptr)},
                         {"outcome", std::string(batch_outcome_name(b.outcome))},
                         {"appended", b.appended}});
    const bool is_filled = l.status == SubgroupStatus::Filled;
    filled += is_filled;
    if (!is_filled) partial.push_back(l.pattern.to_json(schema));
    subgroups.push_back({{"pattern", l.pattern.to_json(schema)},
                         {"initial_count", l.initial_count},
                         {"gap", l.gap},
                         {"attempts", l.attempts},
                         {"batches_accepted", l.batches_accepted},
                         {"batches_rejected_distribution", l.batches_rejected_distribution},
                         {"batches_rejected_auc", l.batches_rejected_auc},
                         {"final_accepted_count", l.final_accepted_count},
                         {"status", is_filled ? "filled" : "partial"},
                         {"reference", l.reference.to_json(schema)},
                         {"reference_rows", l.reference_rows},
                         {"per_subgroup_model", l.per_subgroup_model},
                         {"batches", batches}});
  }

  json accepted = json::array();
  for (const auto& a : r.accepted) {
    json rec = json::object();
    for (std::size_t c = 0; c < schema.size(); ++c) rec[schema.column(c).name] = schema.column(c).values[a.record[c]];
    accepted.push_back({{"origin", a.origin.to_json(schema)}, {"record", rec}, {"synthetic", a.synthetic}});
  }

  return {
      {"tool_version", kToolVersion},
      {"config", config},
      {"ocsvm",
       {{"nu", r.ocsvm.nu},
        {"gamma", r.ocsvm.gamma},
        {"rho", r.ocsvm.rho},
        {"support_vectors", r.ocsvm.support_vectors.rows},
        {"iterations", r.ocsvm.iterations},
        {"kkt_violation", r.ocsvm.kkt_violation}}},
      {"subgroups", subgroups},
      {"summary",
       {{"underrepresented", r.logs.size()},
        {"filled", filled},
        {"partial", partial},
        {"accepted_records", r.accepted.size()},
        {"real_rows", r.augmented.size() - r.accepted.size()},
        {"augmented_rows", r.augmented.size()}}},
      {"accepted", accepted},
  };
}

}  // namespace medeq
