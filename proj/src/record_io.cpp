#include "domainrisk/record_io.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace drisk {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Pulls a required "YYYY-MM-DD" field, or reports which field was bad.
std::optional<Date> req_date(const json& j, const char* key, std::string& err) {
  if (!j.contains(key) || !j[key].is_string()) {
    err = std::string("missing or non-string field '") + key + "'";
    return std::nullopt;
  }
  auto d = Date::parse(j[key].get_ref<const std::string&>());
  if (!d) err = std::string("unparseable date in '") + key + "'";
  return d;
}

// Optional date: absent or null mean "not present"; anything else must parse.
bool opt_date(const json& j, const char* key, std::optional<Date>& out, std::string& err) {
  out.reset();
  if (!j.contains(key) || j[key].is_null()) return true;
  if (!j[key].is_string()) {
    err = std::string("field '") + key + "' must be a date string or null";
    return false;
  }
  auto d = Date::parse(j[key].get_ref<const std::string&>());
  if (!d) {
    err = std::string("unparseable date in '") + key + "'";
    return false;
  }
  out = d;
  return true;
}

std::optional<std::string> req_string(const json& j, const char* key, std::string& err) {
  if (!j.contains(key) || !j[key].is_string()) {
    err = std::string("missing or non-string field '") + key + "'";
    return std::nullopt;
  }
  return j[key].get<std::string>();
}

}  // namespace

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::malware: return "malware";
    case AttackKind::phishing: return "phishing";
    case AttackKind::other: return "other";
  }
  return "other";
}

std::optional<AttackKind> attack_kind_from_string(std::string_view s) {
  if (s == "malware") return AttackKind::malware;
  if (s == "phishing") return AttackKind::phishing;
  if (s == "other") return AttackKind::other;
  return std::nullopt;
}

LineParseResult parse_record_line(std::string_view line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return {std::nullopt, "not a JSON object"};

  std::string err;
  auto source = req_string(j, "source", err);
  if (!source) return {std::nullopt, err};
  auto fqdn = req_string(j, "fqdn", err);
  if (!fqdn) return {std::nullopt, err};
  if (fqdn->empty()) return {std::nullopt, "empty fqdn"};
  std::string name = lower(*fqdn);

  if (*source == "whois") {
    WhoisSnapshot s;
    auto obs = req_date(j, "observed_at", err);
    if (!obs) return {std::nullopt, err};
    s.observed_at = *obs;
    auto reg = req_string(j, "registrar", err);
    if (!reg) return {std::nullopt, err};
    s.registrar = std::move(*reg);
    if (!opt_date(j, "creation_date", s.creation_date, err)) return {std::nullopt, err};
    if (!opt_date(j, "expiry_date", s.expiry_date, err)) return {std::nullopt, err};
    if (!opt_date(j, "updated_date", s.updated_date, err)) return {std::nullopt, err};
    if (s.creation_date && s.expiry_date && *s.creation_date > *s.expiry_date)
      return {std::nullopt, "creation_date after expiry_date"};
    if (j.contains("statuses")) {
      if (!j["statuses"].is_array()) return {std::nullopt, "'statuses' must be an array"};
      for (const auto& v : j["statuses"]) {
        if (!v.is_string() || v.get_ref<const std::string&>().empty())
          return {std::nullopt, "'statuses' entries must be non-empty strings"};
        s.statuses.push_back(v.get<std::string>());
      }
    }
    std::sort(s.statuses.begin(), s.statuses.end());
    s.statuses.erase(std::unique(s.statuses.begin(), s.statuses.end()), s.statuses.end());
    return {WhoisLine{std::move(name), std::move(s)}, ""};
  }

  if (*source == "soa") {
    SoaSnapshot s;
    auto obs = req_date(j, "observed_at", err);
    if (!obs) return {std::nullopt, err};
    s.observed_at = *obs;
    auto mname = req_string(j, "mname", err);
    if (!mname) return {std::nullopt, err};
    auto rname = req_string(j, "rname", err);
    if (!rname) return {std::nullopt, err};
    if (mname->empty() || rname->empty()) return {std::nullopt, "empty mname or rname"};
    s.mname = std::move(*mname);
    s.rname = std::move(*rname);
    if (!j.contains("serial") || !j["serial"].is_number_unsigned())
      return {std::nullopt, "'serial' must be an unsigned integer"};
    s.serial = j["serial"].get<std::uint64_t>();
    return {SoaLine{std::move(name), std::move(s)}, ""};
  }

  if (*source == "tls") {
    TlsSnapshot s;
    auto obs = req_date(j, "observed_at", err);
    if (!obs) return {std::nullopt, err};
    s.observed_at = *obs;
    for (auto [key, field] : {std::pair{"issuer_c", &s.issuer_c},
                              std::pair{"issuer_cn", &s.issuer_cn},
                              std::pair{"issuer_o", &s.issuer_o},
                              std::pair{"subject_cn", &s.subject_cn}}) {
      auto v = req_string(j, key, err);
      if (!v) return {std::nullopt, err};
      *field = std::move(*v);
    }
    auto nb = req_date(j, "not_before", err);
    if (!nb) return {std::nullopt, err};
    auto na = req_date(j, "not_after", err);
    if (!na) return {std::nullopt, err};
    if (*nb > *na) return {std::nullopt, "not_before after not_after"};
    s.not_before = *nb;
    s.not_after = *na;
    return {TlsLine{std::move(name), std::move(s)}, ""};
  }

  if (*source == "attack") {
    AttackEvent e;
    auto d = req_date(j, "date", err);
    if (!d) return {std::nullopt, err};
    e.date = *d;
    auto kind = req_string(j, "kind", err);
    if (!kind) return {std::nullopt, err};
    auto k = attack_kind_from_string(*kind);
    if (!k) return {std::nullopt, "unknown attack kind '" + *kind + "'"};
    e.kind = *k;
    return {AttackLine{std::move(name), e}, ""};
  }

  return {std::nullopt, "unknown source '" + *source + "'"};
}

std::string serialize_whois(const std::string& fqdn, const WhoisSnapshot& s) {
  json j;
  j["source"] = "whois";
  j["fqdn"] = fqdn;
  j["observed_at"] = s.observed_at.to_string();
  j["registrar"] = s.registrar;
  j["creation_date"] = s.creation_date ? json(s.creation_date->to_string()) : json(nullptr);
  j["expiry_date"] = s.expiry_date ? json(s.expiry_date->to_string()) : json(nullptr);
  j["updated_date"] = s.updated_date ? json(s.updated_date->to_string()) : json(nullptr);
  j["statuses"] = s.statuses;
  return j.dump();
}

std::string serialize_soa(const std::string& fqdn, const SoaSnapshot& s) {
  json j;
  j["source"] = "soa";
  j["fqdn"] = fqdn;
  j["observed_at"] = s.observed_at.to_string();
  j["mname"] = s.mname;
  j["rname"] = s.rname;
  j["serial"] = s.serial;
  return j.dump();
}

std::string serialize_tls(const std::string& fqdn, const TlsSnapshot& s) {
  json j;
  j["source"] = "tls";
  j["fqdn"] = fqdn;
  j["observed_at"] = s.observed_at.to_string();
  j["issuer_c"] = s.issuer_c;
  j["issuer_cn"] = s.issuer_cn;
  j["issuer_o"] = s.issuer_o;
  j["not_before"] = s.not_before.to_string();
  j["not_after"] = s.not_after.to_string();
  j["subject_cn"] = s.subject_cn;
  return j.dump();
}

std::string serialize_attack(const std::string& fqdn, const AttackEvent& e) {
  json j;
  j["source"] = "attack";
  j["fqdn"] = fqdn;
  j["date"] = e.date.to_string();
  j["kind"] = to_string(e.kind);
  return j.dump();
}

}  // namespace drisk
