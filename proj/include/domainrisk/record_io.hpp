#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "domainrisk/records.hpp"

namespace drisk {

// Wire format: one JSON object per line, discriminated by "source".
//   {"source":"whois","fqdn":...,"observed_at":"YYYY-MM-DD","registrar":...,
//    "creation_date":...|null,"expiry_date":...|null,"updated_date":...|null,
//    "statuses":[...]}
//   {"source":"soa","fqdn":...,"observed_at":...,"mname":...,"rname":...,"serial":N}
//   {"source":"tls","fqdn":...,"observed_at":...,"issuer_c":...,"issuer_cn":...,
//    "issuer_o":...,"not_before":...,"not_after":...,"subject_cn":...}
//   {"source":"attack","fqdn":...,"date":...,"kind":"malware"|"phishing"|"other"}

struct WhoisLine {
  std::string fqdn;
  WhoisSnapshot snapshot;
};
struct SoaLine {
  std::string fqdn;
  SoaSnapshot snapshot;
};
struct TlsLine {
  std::string fqdn;
  TlsSnapshot snapshot;
};
struct AttackLine {
  std::string fqdn;
  AttackEvent event;
};

using ParsedRecord = std::variant<WhoisLine, SoaLine, TlsLine, AttackLine>;

// On failure `record` is empty and `error` says why. fqdn is lower-cased.
struct LineParseResult {
  std::optional<ParsedRecord> record;
  std::string error;
};

LineParseResult parse_record_line(std::string_view line);

// Single-line JSON, stable key order. These round-trip through parse_record_line.
std::string serialize_whois(const std::string& fqdn, const WhoisSnapshot& s);
std::string serialize_soa(const std::string& fqdn, const SoaSnapshot& s);
std::string serialize_tls(const std::string& fqdn, const TlsSnapshot& s);
std::string serialize_attack(const std::string& fqdn, const AttackEvent& e);

}  // namespace drisk
