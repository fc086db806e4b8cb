#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medeq/dataset.hpp"
#include "medeq/pattern.hpp"

namespace medeq {

enum class Tier {
  HighlyOver,
  Over,
  Adequate,
  Under,
  HighlyUnder,
  AbsentInReal,
  AbsentInSynthetic,
};

inline constexpr std::size_t kTierCount = 7;
inline constexpr std::array<Tier, kTierCount> kAllTiers = {
    Tier::HighlyOver,  Tier::Over,         Tier::Adequate,         Tier::Under,
    Tier::HighlyUnder, Tier::AbsentInReal, Tier::AbsentInSynthetic,
};

std::string_view tier_name(Tier t);  // "highly_over", ..., "absent_in_real"
Tier tier_from_name(std::string_view name);

enum class LogBase { Natural, Ten };

// ln(p_s / p_r), or one of two markers when a proportion is zero.
// p_r == 0 wins over p_s == 0.
struct LogDisparity {
  enum class Kind { Defined, AbsentInReal, AbsentInSynthetic };
  Kind kind = Kind::Defined;
  double value = 0.0;

  bool defined() const { return kind == Kind::Defined; }
  friend bool operator==(const LogDisparity&, const LogDisparity&) = default;
};

LogDisparity log_disparity(double p_synthetic, double p_real, LogBase base = LogBase::Natural);

// Bands on v with t8 = log(0.8), t9 = log(0.9) in the same base:
//   v > -t8 highly over; -t9 < v <= -t8 over; t9 <= v <= -t9 adequate;
//   t8 <= v < t9 under; v < t8 highly under.
Tier classify_tier(double value, LogBase base = LogBase::Natural);
Tier classify_tier(const LogDisparity& d, LogBase base = LogBase::Natural);

struct DisparityRecord {
  Pattern pattern;
  double p_synthetic = 0.0;
  double p_real = 0.0;
  LogDisparity value;
  Tier tier = Tier::Adequate;

  friend bool operator==(const DisparityRecord&, const DisparityRecord&) = default;
};

DisparityRecord make_record(Pattern pattern, double p_synthetic, double p_real);

// One record per full combination over `attributes` (lexicographic order).
std::vector<DisparityRecord> disparity_table(const Dataset& real, const Dataset& synthetic,
                                             std::span<const std::size_t> attributes);
std::vector<DisparityRecord> disparity_table(const Dataset& real, const Dataset& synthetic,
                                             const std::vector<std::string>& attributes);

struct SunburstNode {
  std::string label;      // category value; "all" at the root
  std::string attribute;  // column name; empty at the root
  std::size_t depth = 0;
  DisparityRecord record;
  std::vector<SunburstNode> children;

  friend bool operator==(const SunburstNode&, const SunburstNode&) = default;
};

inline const std::vector<std::string> kDefaultRingOrder = {"mortality", "race", "age", "gender"};
inline const std::vector<std::string> kDefaultSubgroupKey = {"gender", "race", "age"};

SunburstNode build_sunburst(const Dataset& real, const Dataset& synthetic,
                            std::span<const std::size_t> ring_order);
SunburstNode build_sunburst(const Dataset& real, const Dataset& synthetic,
                            const std::vector<std::string>& ring_order);

struct TierHistogram {
  std::array<std::size_t, kTierCount> counts{};

  std::size_t& operator[](Tier t) { return counts[static_cast<std::size_t>(t)]; }
  std::size_t operator[](Tier t) const { return counts[static_cast<std::size_t>(t)]; }
  std::size_t total() const;
  // HighlyOver + HighlyUnder + both Absent tiers.
  std::size_t extremes() const;

  friend bool operator==(const TierHistogram&, const TierHistogram&) = default;
};

TierHistogram tally_histogram(std::span<const DisparityRecord> table);

}  // namespace medeq
