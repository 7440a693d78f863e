#pragma once

#include <cstdint>
#include <iosfwd>

#include <json.hpp>

#include "domainrisk/date.hpp"

namespace drisk {

struct ArchetypeCounts {
  int stable_benign = 0;
  int drop_catch = 0;        // aged domain lapses, is re-registered, then weaponized
  int fresh_malicious = 0;   // registered shortly before the attack
  int lapsed = 0;            // attacked long ago, then the records dry up
  int total() const { return stable_benign + drop_catch + fresh_malicious + lapsed; }
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  ArchetypeCounts counts;
  Date span_start = Date::from_ymd(2023, 1, 1);
  Date span_end = Date::from_ymd(2023, 9, 30);
  int whois_poll_days = 35;
  int soa_poll_days = 30;
  int tls_poll_days = 30;
  double missing_field_prob = 0.10;  // chance a whois optional date is dropped per record
  int gap_jitter_days = 3;           // poll cadence wobble, +-days
};

// Streams the whole corpus as JSONL record lines (snapshots and attacks,
// grouped per domain) and returns the manifest: a flat fqdn -> archetype map.
// Same config in, byte-identical stream out. Throws std::invalid_argument on
// an empty corpus or an inverted/too-short span.
nlohmann::json generate_corpus(const ScenarioConfig& config, std::ostream& records);

}  // namespace drisk
