#include "domainrisk/timeline.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace drisk {

namespace {

template <typename Snap>
std::span<const Snap> prefix_visible(const std::vector<Snap>& list, Date t) {
  auto it = std::upper_bound(list.begin(), list.end(), t,
                             [](Date d, const Snap& s) { return d < s.observed_at; });
  return {list.data(), static_cast<std::size_t>(it - list.begin())};
}

}  // namespace

DomainTimeline::DomainTimeline(DomainHistory history, std::vector<Date> dates)
    : history_(std::move(history)), dates_(std::move(dates)) {}

EvaluationPoint DomainTimeline::operator[](std::size_t i) const {
  return visible_at(history_, dates_[i]);
}

EvaluationPoint visible_at(const DomainHistory& history, Date t) {
  return {t, prefix_visible(history.whois, t), prefix_visible(history.soa, t),
          prefix_visible(history.tls, t)};
}

DomainTimeline build_timeline(DomainHistory history, const TimelineConfig& config) {
  if (config.grid_step_days < 1) throw std::invalid_argument("grid_step_days must be >= 1");
  if (history.empty()) return DomainTimeline(std::move(history), {});

  Date first(std::numeric_limits<int>::max()), last(std::numeric_limits<int>::min());
  auto widen = [&](Date d) {
    first = std::min(first, d);
    last = std::max(last, d);
  };
  for (const auto& s : history.whois) widen(s.observed_at);
  for (const auto& s : history.soa) widen(s.observed_at);
  for (const auto& s : history.tls) widen(s.observed_at);
  if (config.horizon_end < last)
    throw std::invalid_argument("horizon_end precedes the latest record at " + last.to_string());

  std::vector<Date> dates;
  for (Date t = first; t <= config.horizon_end; t += config.grid_step_days) dates.push_back(t);
  if (config.include_change_dates) {
    for (const auto& s : history.whois) dates.push_back(s.observed_at);
    for (const auto& s : history.soa) dates.push_back(s.observed_at);
    for (const auto& s : history.tls) dates.push_back(s.observed_at);
  }
  std::sort(dates.begin(), dates.end());
  dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
  return DomainTimeline(std::move(history), std::move(dates));
}

}  // namespace drisk
