#pragma once

#include <span>
#include <string>
#include <vector>

#include "domainrisk/records.hpp"

namespace drisk {

struct TimelineConfig {
  int grid_step_days = 7;
  bool include_change_dates = true;  // add every distinct record date as a point
  Date horizon_end;                  // last date evaluation may reach
};

// One place on a domain's timeline: the date plus exactly the records that
// had been observed by then. Spans alias the timeline (or caller) history,
// which is what makes later-dated records invisible by construction.
struct EvaluationPoint {
  Date t;
  std::span<const WhoisSnapshot> visible_whois;
  std::span<const SoaSnapshot> visible_soa;
  std::span<const TlsSnapshot> visible_tls;
};

// Owns a copy of the history so its points stay valid on their own.
class DomainTimeline {
 public:
  DomainTimeline() = default;
  DomainTimeline(DomainHistory history, std::vector<Date> dates);

  const std::string& fqdn() const { return history_.fqdn; }
  const DomainHistory& history() const { return history_; }
  std::size_t size() const { return dates_.size(); }
  bool empty() const { return dates_.empty(); }
  Date date_at(std::size_t i) const { return dates_[i]; }
  const std::vector<Date>& dates() const { return dates_; }
  EvaluationPoint operator[](std::size_t i) const;

 private:
  DomainHistory history_;
  std::vector<Date> dates_;  // sorted, distinct
};

// Points = every distinct observed_at across sources (when enabled) plus a
// uniform grid from the earliest record to horizon_end. Empty history gives
// an empty timeline. Throws std::invalid_argument if grid_step_days < 1 or
// horizon_end precedes the earliest record.
DomainTimeline build_timeline(DomainHistory history, const TimelineConfig& config);

// Prefixes of `history` visible at t (observed_at <= t). The spans alias
// `history`, so it must outlive the returned point.
EvaluationPoint visible_at(const DomainHistory& history, Date t);

}  // namespace drisk
