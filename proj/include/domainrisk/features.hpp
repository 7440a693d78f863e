#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domainrisk/timeline.hpp"

namespace drisk {

inline constexpr int kWhoisDims = 30;
inline constexpr int kSoaDims = 11;
inline constexpr int kTlsDims = 18;
inline constexpr int kFeatureCount = kWhoisDims + kSoaDims + kTlsDims;  // 59

inline constexpr double kMissing = -1.0;  // sentinel for undefined day-quantities

using FeatureVector = std::array<double, kFeatureCount>;

// Column names, in feature-vector order (w1_reg_uniq ... t16_subjcn_chg).
const std::array<std::string, kFeatureCount>& feature_names();

// Recognized EPP status codes, in primary-status priority order.
// Index 13 ("other") catches non-empty status sets outside the vocabulary.
const std::array<std::string, 14>& status_vocabulary();

// Which source blocks a model consumes. Projection keeps vector order:
// WHOIS dims, then SOA, then TLS.
struct FeatureSetSelector {
  bool whois = true;
  bool soa = true;
  bool tls = true;

  // "all", "whois", "soa", "tls", or +-joined combos like "whois+tls".
  static std::optional<FeatureSetSelector> parse(std::string_view text);
  std::string to_string() const;
  int dims() const { return (whois ? kWhoisDims : 0) + (soa ? kSoaDims : 0) + (tls ? kTlsDims : 0); }
  bool any() const { return whois || soa || tls; }
  friend bool operator==(FeatureSetSelector, FeatureSetSelector) = default;
};

// Names of the projected columns, in projection order.
std::vector<std::string> selected_feature_names(FeatureSetSelector sel);

// The full 59-dim vector for one evaluation point. Total: empty prefixes
// yield count 0 / day-quantity -1 / boolean 0 / all-zero status one-hot.
FeatureVector extract_features(const EvaluationPoint& point);

// Throws std::invalid_argument when no block is selected.
std::vector<double> project(const FeatureVector& full, FeatureSetSelector sel);

}  // namespace drisk
