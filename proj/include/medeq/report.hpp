#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "medeq/dataset.hpp"
#include "medeq/disparity.hpp"
#include "medeq/equalizer.hpp"
#include "medeq/subgroups.hpp"

namespace medeq {

inline constexpr const char* kToolVersion = "medeq 0.3.0";

struct AuditOptions {
  std::vector<std::string> attributes = kDefaultSubgroupKey;
  std::vector<std::string> ring_order = kDefaultRingOrder;
  std::size_t tau = 150;
  std::string real_id = "real";
  std::string synthetic_id = "synthetic";
  nlohmann::json config = nlohmann::json::object();  // echoed into metadata
};

struct AuditReport {
  Schema schema;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<std::string> attributes;
  std::vector<DisparityRecord> table;
  TierHistogram histogram;
  std::vector<std::string> ring_order;
  SunburstNode sunburst;
  CoverageReport coverage;  // over the real data, keyed by `attributes`

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

AuditReport build_audit(const Dataset& real, const Dataset& synthetic, const AuditOptions& opts = {});

// Disparity values are rounded to 6 decimals on output.
double round6(double v);

// Canonical form: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

nlohmann::json audit_to_json(const AuditReport& r);
AuditReport audit_from_json(const nlohmann::json& j);
void emit_audit_json(const AuditReport& r, const std::filesystem::path& path);
AuditReport read_audit_json(const std::filesystem::path& path);

struct TierTransition {
  Pattern pattern;
  Tier from = Tier::Adequate;
  Tier to = Tier::Adequate;
  friend bool operator==(const TierTransition&, const TierTransition&) = default;
};

struct ComparisonReport {
  Schema schema;
  std::vector<std::string> attributes;
  TierHistogram before;
  TierHistogram after;
  std::vector<TierTransition> transitions;

  long long delta(Tier t) const {
    return static_cast<long long>(after[t]) - static_cast<long long>(before[t]);
  }
};

ComparisonReport compare_reports(const AuditReport& before, const AuditReport& after);
nlohmann::json comparison_to_json(const ComparisonReport& c);

nlohmann::json augmentation_log_json(const AugmentationResult& r, const Schema& schema);
nlohmann::json coverage_to_json(const CoverageReport& c, const Schema& schema);

// ---- SVG ---------------------------------------------------------------------

std::string_view tier_color(Tier t);

struct SunburstSector {
  std::size_t depth = 0;  // ring index, 1 = innermost
  double start_deg = 0.0;
  double end_deg = 0.0;
  Tier tier = Tier::Adequate;
  std::string annotation;
};

// Angular extent of each node is its share of the parent's real rows; a
// parent without real rows splits evenly.
std::vector<SunburstSector> sunburst_sectors(const SunburstNode& root, const Schema& schema);
std::string sunburst_svg(const SunburstNode& root, const Schema& schema);
void render_sunburst_svg(const SunburstNode& root, const Schema& schema,
                         const std::filesystem::path& path);

std::string histogram_svg(const std::vector<std::pair<std::string, TierHistogram>>& series);
void render_histogram_svg(const std::vector<std::pair<std::string, TierHistogram>>& series,
                          const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace medeq
