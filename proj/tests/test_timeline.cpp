#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "domainrisk/timeline.hpp"

using namespace drisk;

namespace {

Date d(const char* iso) { return *Date::parse(iso); }

WhoisSnapshot whois_at(Date t, const char* registrar = "reg-a") {
  WhoisSnapshot s;
  s.observed_at = t;
  s.registrar = registrar;
  s.statuses = {"ok"};
  return s;
}

SoaSnapshot soa_at(Date t, std::uint64_t serial = 1) {
  return SoaSnapshot{t, "ns1.host.test", "admin.host.test", serial};
}

TlsSnapshot tls_at(Date t) {
  return TlsSnapshot{t, "US", "Issuer CN", "Issuer Org", t - 5, t + 85, "host.test"};
}

DomainHistory sample_history() {
  DomainHistory h;
  h.fqdn = "host.test";
  h.whois = {whois_at(d("2023-01-10")), whois_at(d("2023-02-14"), "reg-b")};
  h.soa = {soa_at(d("2023-01-12")), soa_at(d("2023-03-01"), 2)};
  h.tls = {tls_at(d("2023-01-20"))};
  return h;
}

}  // namespace

TEST_SUITE("timeline") {

TEST_CASE("points are the sorted union of grid and record dates") {
  TimelineConfig cfg;
  cfg.grid_step_days = 30;
  cfg.horizon_end = d("2023-03-15");
  DomainTimeline tl = build_timeline(sample_history(), cfg);

  REQUIRE_FALSE(tl.empty());
  // Grid from the earliest record (2023-01-10) in 30-day steps.
  const std::vector<Date> expect = {d("2023-01-10"), d("2023-01-12"), d("2023-01-20"),
                                    d("2023-02-09"), d("2023-02-14"), d("2023-03-01"),
                                    d("2023-03-11")};
  CHECK(tl.dates() == expect);
  CHECK(std::is_sorted(tl.dates().begin(), tl.dates().end()));
  CHECK(std::adjacent_find(tl.dates().begin(), tl.dates().end()) == tl.dates().end());
}

TEST_CASE("grid-only layout when change dates are disabled") {
  TimelineConfig cfg;
  cfg.grid_step_days = 30;
  cfg.include_change_dates = false;
  cfg.horizon_end = d("2023-03-15");
  DomainTimeline tl = build_timeline(sample_history(), cfg);
  CHECK(tl.dates() == std::vector<Date>{d("2023-01-10"), d("2023-02-09"), d("2023-03-11")});
}

TEST_CASE("each point sees exactly the records dated at or before it") {
  TimelineConfig cfg;
  cfg.grid_step_days = 7;
  cfg.horizon_end = d("2023-03-15");
  DomainTimeline tl = build_timeline(sample_history(), cfg);

  for (std::size_t i = 0; i < tl.size(); ++i) {
    EvaluationPoint p = tl[i];
    CHECK(p.t == tl.date_at(i));
    for (const auto& s : p.visible_whois) CHECK(s.observed_at <= p.t);
    for (const auto& s : p.visible_soa) CHECK(s.observed_at <= p.t);
    for (const auto& s : p.visible_tls) CHECK(s.observed_at <= p.t);
    // Nothing visible is missing: counts match a manual filter of the history.
    const DomainHistory& h = tl.history();
    auto count_le = [&](const auto& list) {
      return static_cast<std::size_t>(
          std::count_if(list.begin(), list.end(),
                        [&](const auto& s) { return s.observed_at <= p.t; }));
    };
    CHECK(p.visible_whois.size() == count_le(h.whois));
    CHECK(p.visible_soa.size() == count_le(h.soa));
    CHECK(p.visible_tls.size() == count_le(h.tls));
  }
}

TEST_CASE("visibility boundary is inclusive on the record date") {
  DomainHistory h = sample_history();
  EvaluationPoint on = visible_at(h, d("2023-02-14"));
  CHECK(on.visible_whois.size() == 2);  // the 02-14 snapshot counts
  EvaluationPoint before = visible_at(h, d("2023-02-13"));
  CHECK(before.visible_whois.size() == 1);
  EvaluationPoint none = visible_at(h, d("2023-01-01"));
  CHECK(none.visible_whois.empty());
  CHECK(none.visible_soa.empty());
  CHECK(none.visible_tls.empty());
}

TEST_CASE("empty history gives an empty timeline") {
  DomainHistory h;
  h.fqdn = "empty.test";
  TimelineConfig cfg;
  cfg.horizon_end = d("2023-03-15");
  CHECK(build_timeline(h, cfg).empty());
}

TEST_CASE("bad configuration throws") {
  TimelineConfig cfg;
  cfg.grid_step_days = 0;
  cfg.horizon_end = d("2023-03-15");
  CHECK_THROWS_AS(build_timeline(sample_history(), cfg), std::invalid_argument);

  TimelineConfig early;
  early.grid_step_days = 7;
  early.horizon_end = d("2023-02-01");  // before the last record (2023-03-01)
  CHECK_THROWS_AS(build_timeline(sample_history(), early), std::invalid_argument);
}

}  // TEST_SUITE
