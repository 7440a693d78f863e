#pragma once

#include <span>
#include <string>
#include <vector>

#include "domainrisk/features.hpp"
#include "domainrisk/timeline.hpp"

namespace drisk {

struct LabelingConfig {
  int n_days = 7;  // must be >= 1
};

// Positive iff some attack date a satisfies 0 <= (a - t) < n_days: the point
// lies inside the N-day window leading up to an attack. A point dated exactly
// N days before an attack is negative; a point on the attack date is positive.
// attack_dates must be sorted ascending. Throws std::invalid_argument on n_days < 1.
bool label_point(Date t, std::span<const Date> attack_dates, const LabelingConfig& config);

struct LabeledRow {
  std::string fqdn;
  Date t;
  FeatureVector features;
  int label = 0;  // 1 = attack within the next n_days
};

// One labeled feature row per evaluation point, in timeline order.
std::vector<LabeledRow> label_timeline(const DomainTimeline& timeline,
                                       std::span<const Date> attack_dates,
                                       const LabelingConfig& config);

}  // namespace drisk
