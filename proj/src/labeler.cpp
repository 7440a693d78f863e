#include "domainrisk/labeler.hpp"

#include <algorithm>
#include <stdexcept>

namespace drisk {

bool label_point(Date t, std::span<const Date> attack_dates, const LabelingConfig& config) {
  if (config.n_days < 1) throw std::invalid_argument("n_days must be >= 1");
  // First attack at or after t; positive iff it lands within t + n_days - 1.
  auto it = std::lower_bound(attack_dates.begin(), attack_dates.end(), t);
  return it != attack_dates.end() && *it - t < config.n_days;
}

std::vector<LabeledRow> label_timeline(const DomainTimeline& timeline,
                                       std::span<const Date> attack_dates,
                                       const LabelingConfig& config) {
  std::vector<LabeledRow> rows;
  rows.reserve(timeline.size());
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    EvaluationPoint point = timeline[i];
    rows.push_back({timeline.fqdn(), point.t, extract_features(point),
                    label_point(point.t, attack_dates, config) ? 1 : 0});
  }
  return rows;
}

}  // namespace drisk
