#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "domainrisk/date.hpp"

namespace drisk {

// One dated WHOIS observation. Optional dates may be missing in the wild;
// statuses are kept sorted and deduplicated so set comparison is plain ==.
struct WhoisSnapshot {
  Date observed_at;
  std::string registrar;
  std::optional<Date> creation_date;
  std::optional<Date> expiry_date;
  std::optional<Date> updated_date;
  std::vector<std::string> statuses;

  bool content_equals(const WhoisSnapshot& o) const {
    return registrar == o.registrar && creation_date == o.creation_date &&
           expiry_date == o.expiry_date && updated_date == o.updated_date &&
           statuses == o.statuses;
  }
};

struct SoaSnapshot {
  Date observed_at;
  std::string mname;
  std::string rname;
  std::uint64_t serial = 0;

  bool content_equals(const SoaSnapshot& o) const {
    return mname == o.mname && rname == o.rname && serial == o.serial;
  }
};

struct TlsSnapshot {
  Date observed_at;
  std::string issuer_c;
  std::string issuer_cn;
  std::string issuer_o;
  Date not_before;
  Date not_after;
  std::string subject_cn;

  bool content_equals(const TlsSnapshot& o) const {
    return issuer_c == o.issuer_c && issuer_cn == o.issuer_cn && issuer_o == o.issuer_o &&
           not_before == o.not_before && not_after == o.not_after && subject_cn == o.subject_cn;
  }
};

enum class AttackKind { malware, phishing, other };

std::string to_string(AttackKind kind);
std::optional<AttackKind> attack_kind_from_string(std::string_view s);

struct AttackEvent {
  Date date;
  AttackKind kind = AttackKind::other;

  friend bool operator==(const AttackEvent&, const AttackEvent&) = default;
};

// Everything ever observed for one domain name. Each snapshot list is kept
// sorted by observed_at with at most one record per (source, day).
struct DomainHistory {
  std::string fqdn;
  std::vector<WhoisSnapshot> whois;
  std::vector<SoaSnapshot> soa;
  std::vector<TlsSnapshot> tls;

  bool empty() const { return whois.empty() && soa.empty() && tls.empty(); }
  std::size_t record_count() const { return whois.size() + soa.size() + tls.size(); }
};

}  // namespace drisk
