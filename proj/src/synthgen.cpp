#include "domainrisk/synthgen.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "domainrisk/record_io.hpp"
#include "domainrisk/records.hpp"

namespace drisk {
namespace {

// Self-contained splitmix64 stream so corpora are reproducible across
// standard libraries (std distributions make no such promise).
class Rng {
 public:
  explicit Rng(std::uint64_t s) : state_(s ? s : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Inclusive on both ends.
  int uniform(int lo, int hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform01() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[next() % v.size()];
  }

 private:
  std::uint64_t state_;
};

struct Issuer {
  std::string country;
  std::string cn;
  std::string org;
};

const std::vector<std::string>& benign_registrars() {
  static const std::vector<std::string> v = {
      "Foo Inc", "Northwind Names LLC", "Blue Harbor Registrar",
      "Alpine Domains GmbH", "Meridian Registry Services"};
  return v;
}

const std::vector<std::string>& capture_registrars() {
  static const std::vector<std::string> v = {
      "Bar Ltd", "QuickReg Partners", "DomainDash Inc", "SnapName Brokers"};
  return v;
}

const std::vector<std::string>& benign_dns() {
  static const std::vector<std::string> v = {"foo-dns", "cloudnine", "rockdns",
                                             "steadyhost", "meridian-ns"};
  return v;
}

const std::vector<std::string>& capture_dns() {
  static const std::vector<std::string> v = {"bar-dns", "parkzone", "quicklaunch"};
  return v;
}

const std::vector<Issuer>& benign_issuers() {
  static const std::vector<Issuer> v = {
      {"US", "BazCert RSA CA 1", "BazCert Corp"},
      {"US", "TrustLane TLS CA", "TrustLane Inc"},
      {"GB", "Albion Secure CA 2", "Albion Security Ltd"}};
  return v;
}

const std::vector<Issuer>& budget_issuers() {
  static const std::vector<Issuer> v = {
      {"US", "QuxCert Free CA", "QuxCert Inc"},
      {"PA", "ZeroCost TLS CA", "ZeroCost SA"}};
  return v;
}

std::string mname_of(const std::string& dns_word) { return "ns1." + dns_word + ".test"; }
std::string rname_of(const std::string& dns_word) { return "hostmaster." + dns_word + ".test"; }

// Poll grid: cadence with jitter, plus every state-transition date so the
// stream never skips over a change entirely.
std::vector<Date> poll_dates(Rng& rng, Date from, Date to, int cadence, int jitter,
                             const std::vector<Date>& events) {
  std::vector<Date> out;
  if (from > to) return out;
  Date t = from;
  while (t <= to) {
    out.push_back(t);
    int step = cadence;
    if (jitter > 0) step += rng.uniform(-jitter, jitter);
    if (step < 1) step = 1;
    t = t + step;
  }
  for (Date e : events) {
    if (e >= from && e <= to) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Same calendar day in `year`; Feb 29 falls back to Mar 1.
Date anniversary_in_year(Date creation, int year) {
  namespace chr = std::chrono;
  const chr::year_month_day ymd{chr::sys_days{chr::days{creation.serial()}}};
  chr::year_month_day cand{chr::year{year}, ymd.month(), ymd.day()};
  if (!cand.ok()) cand = chr::year_month_day{chr::year{year}, chr::March, chr::day{1}};
  return Date(static_cast<int>(chr::sys_days{cand}.time_since_epoch().count()));
}

int year_of(Date d) {
  namespace chr = std::chrono;
  const chr::year_month_day ymd{chr::sys_days{chr::days{d.serial()}}};
  return static_cast<int>(ymd.year());
}

struct WhoisState {
  std::string registrar;
  std::optional<Date> creation;
  std::optional<Date> expiry;
  std::optional<Date> updated;
  std::vector<std::string> statuses;
};

WhoisSnapshot make_whois(Rng& rng, const std::string& fqdn, Date at, const WhoisState& st,
                         double missing_prob) {
  WhoisSnapshot s;
  (void)fqdn;
  s.observed_at = at;
  s.registrar = st.registrar;
  s.creation_date = (st.creation && !rng.chance(missing_prob)) ? st.creation : std::nullopt;
  s.expiry_date = (st.expiry && !rng.chance(missing_prob)) ? st.expiry : std::nullopt;
  s.updated_date = (st.updated && !rng.chance(missing_prob)) ? st.updated : std::nullopt;
  s.statuses = st.statuses;
  std::sort(s.statuses.begin(), s.statuses.end());
  return s;
}

class Emitter {
 public:
  Emitter(std::ostream& out, std::string fqdn) : out_(out), fqdn_(std::move(fqdn)) {}

  void whois(const WhoisSnapshot& s) { out_ << serialize_whois(fqdn_, s) << '\n'; }
  void soa(const SoaSnapshot& s) { out_ << serialize_soa(fqdn_, s) << '\n'; }
  void tls(const TlsSnapshot& s) { out_ << serialize_tls(fqdn_, s) << '\n'; }
  void attack(const AttackEvent& a) { out_ << serialize_attack(fqdn_, a) << '\n'; }

 private:
  std::ostream& out_;
  std::string fqdn_;
};

// Piecewise-constant state lookup: value of the last transition at or before t.
template <typename T>
const T& state_at(const std::vector<std::pair<Date, T>>& transitions, Date t) {
  const T* cur = &transitions.front().second;
  for (const auto& [when, val] : transitions) {
    if (when > t) break;
    cur = &val;
  }
  return *cur;
}

struct CertSchedule {
  std::vector<Date> issues;  // ascending issuance dates
  Issuer issuer;
  int lifetime_days = 90;
};

// Emits one TLS record per poll, showing the latest issued cert (which may
// already be expired -- parked domains keep serving stale certs).
void emit_tls_polls(Emitter& em, const std::string& fqdn, const std::vector<Date>& polls,
                    const std::vector<CertSchedule>& schedules) {
  for (Date t : polls) {
    const CertSchedule* sched = nullptr;
    Date issue_date = t;
    for (const auto& cs : schedules) {
      for (Date d : cs.issues) {
        if (d <= t && (!sched || d >= issue_date)) {
          sched = &cs;
          issue_date = d;
        }
      }
    }
    if (!sched) continue;  // nothing issued yet
    TlsSnapshot s;
    s.observed_at = t;
    s.issuer_c = sched->issuer.country;
    s.issuer_cn = sched->issuer.cn;
    s.issuer_o = sched->issuer.org;
    s.not_before = issue_date;
    s.not_after = issue_date + sched->lifetime_days;
    s.subject_cn = fqdn;
    em.tls(s);
  }
}

std::vector<Date> cert_issue_dates(Date first, Date until, int lifetime) {
  std::vector<Date> out;
  for (Date d = first; d <= until; d = d + lifetime) out.push_back(d);
  return out;
}

// Registrars refresh record metadata on a fixed bimonthly cadence; every
// archetype shares it so update recency and gap statistics look identical
// no matter how long a domain has been observed.
std::vector<Date> updated_refresh_dates(Rng& rng, Date from, Date to) {
  std::vector<Date> out;
  Date t = from + rng.uniform(20, 60);
  while (t <= to) {
    out.push_back(t);
    t = t + 60;
  }
  return out;
}

Date latest_at_or_before(const std::vector<Date>& dates, Date t, Date fallback) {
  Date best = fallback;
  for (Date d : dates) {
    if (d <= t && d > best) best = d;
  }
  return best;
}

void emit_soa_polls(Emitter& em, Rng& rng, Date from, Date to, const ScenarioConfig& cfg,
                    const std::vector<std::pair<Date, std::string>>& dns_transitions,
                    const std::vector<Date>& bumps, std::uint64_t serial_base) {
  std::vector<Date> events = bumps;
  for (const auto& tr : dns_transitions) events.push_back(tr.first);
  const std::vector<Date> polls =
      poll_dates(rng, from, to, cfg.soa_poll_days, cfg.gap_jitter_days, events);
  for (Date t : polls) {
    const std::string& word = state_at(dns_transitions, t);
    SoaSnapshot s;
    s.observed_at = t;
    s.mname = mname_of(word);
    s.rname = rname_of(word);
    std::uint64_t serial = serial_base;
    for (Date b : bumps) {
      if (b <= t) ++serial;
    }
    // Provider moves reset the zone, which shows up as a fresh serial epoch.
    for (const auto& tr : dns_transitions) {
      if (tr.first <= t && tr.first > from) serial += 100;
    }
    s.serial = serial;
    em.soa(s);
  }
}

void gen_stable_benign(Emitter& em, Rng& rng, const std::string& fqdn,
                       const ScenarioConfig& cfg) {
  const int age_years = rng.uniform(3, 15);
  const Date creation = anniversary_in_year(cfg.span_start - rng.uniform(0, 364),
                                            year_of(cfg.span_start) - age_years);
  WhoisState st;
  st.registrar = rng.pick(benign_registrars());
  st.creation = creation;
  st.statuses = rng.chance(0.5)
                    ? std::vector<std::string>{"ok"}
                    : std::vector<std::string>{"clientTransferProhibited", "ok"};

  // One renewal per anniversary: expiry bumps forward a year each time.
  std::vector<Date> renewals;
  for (int y = year_of(cfg.span_start) - 1; y <= year_of(cfg.span_end) + 1; ++y) {
    renewals.push_back(anniversary_in_year(creation, y));
  }
  auto anchor = [&](Date t) {  // last anniversary at or before t
    Date a = renewals.front();
    for (Date r : renewals) {
      if (r <= t) a = r;
    }
    return a;
  };

  const std::vector<Date> refreshes =
      updated_refresh_dates(rng, cfg.span_start, cfg.span_end);
  std::vector<Date> events = refreshes;  // polls land on refreshes exactly
  for (Date r : renewals) {
    if (r >= cfg.span_start && r <= cfg.span_end) events.push_back(r);
  }
  const std::vector<Date> polls = poll_dates(rng, cfg.span_start, cfg.span_end,
                                             cfg.whois_poll_days, cfg.gap_jitter_days, events);
  for (Date t : polls) {
    const Date a = anchor(t);
    st.updated = latest_at_or_before(refreshes, t, a);
    st.expiry = anniversary_in_year(creation, year_of(a) + 1);
    em.whois(make_whois(rng, fqdn, t, st, cfg.missing_field_prob));
  }

  // Static zone: the serial never moves, so SOA history shows no churn.
  const std::string dns_word = rng.pick(benign_dns());
  const std::vector<std::pair<Date, std::string>> dns = {{cfg.span_start, dns_word}};
  const std::uint64_t serial_base = 2023010100 + rng.uniform(0, 99);
  emit_soa_polls(em, rng, cfg.span_start, cfg.span_end, cfg, dns, {}, serial_base);

  CertSchedule certs;
  certs.issuer = rng.pick(benign_issuers());
  certs.issues = cert_issue_dates(cfg.span_start - rng.uniform(5, 85), cfg.span_end, 90);
  const std::vector<Date> tls_polls = poll_dates(rng, cfg.span_start, cfg.span_end,
                                                 cfg.tls_poll_days, cfg.gap_jitter_days,
                                                 certs.issues);
  emit_tls_polls(em, fqdn, tls_polls, {certs});
}

void gen_drop_catch(Emitter& em, Rng& rng, const std::string& fqdn, const ScenarioConfig& cfg) {
  const int span_len = cfg.span_end - cfg.span_start;
  // Captures land anywhere in the span so re-registration attacks occur at
  // every calendar position; early captures simply have their benign prefix
  // truncated by the start of observation.
  const Date capture = cfg.span_start + rng.uniform(30, span_len - 25);
  Date lapse = capture - rng.uniform(45, 70);
  if (lapse < cfg.span_start + 3) lapse = cfg.span_start + 3;
  const Date attack_date = capture + rng.uniform(25, std::min(55, cfg.span_end - capture));
  const Date takedown = attack_date + rng.uniform(2, 6);

  const int age_years = rng.uniform(4, 12);
  const Date creation_old = lapse - 365 * age_years;

  // Whois phases: aged benign -> expiry lapse statuses -> re-registration.
  const Date auto_renew_end = lapse + 30;
  const Date redemption_end = lapse + 55;
  const std::string reg_old = rng.pick(benign_registrars());
  const std::string reg_new = rng.pick(capture_registrars());

  std::vector<std::pair<Date, WhoisState>> phases;
  {
    WhoisState a{reg_old, creation_old, lapse, Date(lapse - 365),
                 {"clientTransferProhibited", "ok"}};
    phases.emplace_back(cfg.span_start, a);
    WhoisState b = a;
    b.statuses = {"autoRenewPeriod"};
    phases.emplace_back(lapse, b);
    if (auto_renew_end < capture) {
      WhoisState c = a;
      c.statuses = {"redemptionPeriod"};
      phases.emplace_back(auto_renew_end, c);
    }
    if (redemption_end < capture) {
      WhoisState d = a;
      d.statuses = {"pendingDelete"};
      phases.emplace_back(redemption_end, d);
    }
    WhoisState e{reg_new, capture, Date(capture + 365), capture, {"ok"}};
    phases.emplace_back(capture, e);
    if (takedown <= cfg.span_end) {  // abuse desk suspends the domain post-attack
      WhoisState f = e;
      f.statuses = {"serverHold"};
      phases.emplace_back(takedown, f);
    }
  }

  // Routine registrar refreshes only happen while the old owner still holds
  // the name; once the domain lapses the record is frozen until the capture.
  const std::vector<Date> refreshes =
      updated_refresh_dates(rng, cfg.span_start, lapse);
  std::vector<Date> whois_events = refreshes;  // polls land on refreshes exactly
  whois_events.reserve(whois_events.size() + phases.size());
  for (const auto& ph : phases) whois_events.push_back(ph.first);
  const std::vector<Date> polls = poll_dates(rng, cfg.span_start, cfg.span_end,
                                             cfg.whois_poll_days, cfg.gap_jitter_days,
                                             whois_events);
  for (Date t : polls) {
    WhoisState st = state_at(phases, t);
    if (t < lapse)
      st.updated = latest_at_or_before(refreshes, t, st.updated.value_or(creation_old));
    em.whois(make_whois(rng, fqdn, t, st, cfg.missing_field_prob));
  }

  // The old zone dropped out of DNS at the lapse; SOA coverage picks the
  // domain back up once the new owner's zone goes live.
  const Date relaunch_at = capture + rng.uniform(1, 5);
  std::vector<std::pair<Date, std::string>> dns = {{relaunch_at, rng.pick(capture_dns())}};
  if (takedown <= cfg.span_end) dns.emplace_back(takedown, "suspended");
  emit_soa_polls(em, rng, relaunch_at, cfg.span_end, cfg, dns, {},
                 2023010100 + rng.uniform(0, 99));

  // Certs: routine renewals stop at the lapse; a budget-CA precursor cert
  // shows up days before the attack (weaponization immediately precedes use).
  CertSchedule old_certs;
  old_certs.issuer = rng.pick(benign_issuers());
  // One last benign renewal before the lapse. Anchoring it to the lapse keeps
  // the observed TLS-change geometry identical for early and late captures.
  old_certs.issues = {lapse - rng.uniform(10, 80)};
  CertSchedule precursor;
  precursor.issuer = rng.pick(budget_issuers());
  Date precursor_at = attack_date - rng.uniform(3, 6);
  if (precursor_at <= capture) precursor_at = capture + 1;
  precursor.issues = {precursor_at};

  std::vector<Date> tls_events = old_certs.issues;
  tls_events.push_back(precursor_at);
  const std::vector<Date> tls_polls = poll_dates(rng, cfg.span_start, cfg.span_end,
                                                 cfg.tls_poll_days, cfg.gap_jitter_days,
                                                 tls_events);
  emit_tls_polls(em, fqdn, tls_polls, {old_certs, precursor});

  em.attack({attack_date, rng.chance(0.5) ? AttackKind::phishing : AttackKind::malware});
}

void gen_fresh_malicious(Emitter& em, Rng& rng, const std::string& fqdn,
                         const ScenarioConfig& cfg) {
  const int span_len = cfg.span_end - cfg.span_start;
  const Date registered = cfg.span_start + rng.uniform(0, span_len - 75);
  const Date attack_date = registered + rng.uniform(10, 60);
  const Date cert_at = attack_date - rng.uniform(3, 6);
  const Date takedown = attack_date + rng.uniform(2, 6);

  std::vector<std::pair<Date, WhoisState>> phases;
  {
    WhoisState st{rng.pick(capture_registrars()), registered, Date(registered + 365),
                  registered, {"ok"}};
    phases.emplace_back(registered, st);
    if (takedown <= cfg.span_end) {  // abuse desk suspends the domain post-attack
      WhoisState held = st;
      held.statuses = {"serverHold"};
      phases.emplace_back(takedown, held);
    }
  }
  // A short-lived throwaway registration never sees a routine refresh.
  std::vector<Date> whois_events;
  if (takedown <= cfg.span_end) whois_events.push_back(takedown);
  const std::vector<Date> polls = poll_dates(rng, registered, cfg.span_end,
                                             cfg.whois_poll_days, cfg.gap_jitter_days,
                                             whois_events);
  for (Date t : polls)
    em.whois(make_whois(rng, fqdn, t, state_at(phases, t), cfg.missing_field_prob));

  std::vector<std::pair<Date, std::string>> dns = {{registered, rng.pick(capture_dns())}};
  if (takedown <= cfg.span_end) dns.emplace_back(takedown, "suspended");
  emit_soa_polls(em, rng, registered, cfg.span_end, cfg, dns, {},
                 2023010100 + rng.uniform(0, 99));

  CertSchedule certs;
  certs.issuer = rng.pick(budget_issuers());
  certs.issues = {cert_at};
  const std::vector<Date> tls_polls = poll_dates(rng, registered, cfg.span_end,
                                                 cfg.tls_poll_days, cfg.gap_jitter_days,
                                                 {cert_at});
  emit_tls_polls(em, fqdn, tls_polls, {certs});

  em.attack({attack_date, rng.chance(0.5) ? AttackKind::phishing : AttackKind::malware});
}

void gen_lapsed(Emitter& em, Rng& rng, const std::string& fqdn, const ScenarioConfig& cfg) {
  const int span_len = cfg.span_end - cfg.span_start;
  const Date registered = cfg.span_start + rng.uniform(0, std::max(1, span_len / 4));
  const Date first_attack = registered + rng.uniform(10, 40);
  std::vector<AttackEvent> attacks = {
      {first_attack, rng.chance(0.5) ? AttackKind::phishing : AttackKind::malware}};
  if (rng.chance(0.5)) {
    attacks.push_back({first_attack + rng.uniform(3, 15), AttackKind::other});
  }
  const Date takedown = attacks.back().date + rng.uniform(2, 12);
  const Date record_stop = attacks.back().date + rng.uniform(20, 50);

  WhoisState live{rng.pick(capture_registrars()), registered, Date(registered + 365),
                  registered, {"ok"}};
  WhoisState held = live;
  held.statuses = {"serverHold"};
  const std::vector<std::pair<Date, WhoisState>> phases = {{registered, live},
                                                           {takedown, held}};
  const std::vector<Date> polls = poll_dates(rng, registered, record_stop,
                                             cfg.whois_poll_days, cfg.gap_jitter_days,
                                             {takedown});
  for (Date t : polls) {
    em.whois(make_whois(rng, fqdn, t, state_at(phases, t), cfg.missing_field_prob));
  }

  const std::vector<std::pair<Date, std::string>> dns = {{registered, rng.pick(capture_dns())}};
  emit_soa_polls(em, rng, registered, record_stop, cfg, dns, {},
                 2023010100 + rng.uniform(0, 99));

  CertSchedule certs;
  certs.issuer = rng.pick(budget_issuers());
  certs.issues = {Date(registered + rng.uniform(1, 7))};
  const std::vector<Date> tls_polls = poll_dates(rng, registered, record_stop,
                                                 cfg.tls_poll_days, cfg.gap_jitter_days,
                                                 certs.issues);
  emit_tls_polls(em, fqdn, tls_polls, {certs});

  for (const AttackEvent& a : attacks) em.attack(a);
}

std::string make_fqdn(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%05d.synth.test", prefix, index);
  return buf;
}

}  // namespace

nlohmann::json generate_corpus(const ScenarioConfig& config, std::ostream& records) {
  if (config.counts.total() <= 0) {
    throw std::invalid_argument("synthgen: corpus would be empty");
  }
  if (config.span_end - config.span_start < 180) {
    throw std::invalid_argument("synthgen: span must cover at least 180 days");
  }
  if (config.whois_poll_days < 1 || config.soa_poll_days < 1 || config.tls_poll_days < 1) {
    throw std::invalid_argument("synthgen: poll cadences must be positive");
  }

  nlohmann::json manifest = nlohmann::json::object();
  struct Archetype {
    const char* prefix;
    const char* label;
    int count;
    void (*gen)(Emitter&, Rng&, const std::string&, const ScenarioConfig&);
  };
  const Archetype kinds[] = {
      {"sb", "stable_benign", config.counts.stable_benign, gen_stable_benign},
      {"dc", "drop_catch_malicious", config.counts.drop_catch, gen_drop_catch},
      {"fm", "fresh_malicious", config.counts.fresh_malicious, gen_fresh_malicious},
      {"lt", "lapsed_formerly_malicious", config.counts.lapsed, gen_lapsed},
  };

  std::uint64_t stream = 0;
  for (const Archetype& k : kinds) {
    ++stream;
    for (int i = 1; i <= k.count; ++i) {
      const std::string fqdn = make_fqdn(k.prefix, i);
      Rng rng(config.seed * 0x100000001b3ull + stream * 1000003ull +
              static_cast<std::uint64_t>(i));
      Emitter em(records, fqdn);
      k.gen(em, rng, fqdn, config);
      manifest[fqdn] = k.label;
    }
  }
  return manifest;
}

}  // namespace drisk
