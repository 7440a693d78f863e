#include "domainrisk/history_store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "domainrisk/fs_util.hpp"
#include "domainrisk/record_io.hpp"

namespace drisk {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxErrorSamples = 10;

const char* kLogNames[] = {"whois.log", "soa.log", "tls.log", "attack.log"};
constexpr const char* kIndexName = "index.jsonl";

// Insert keeping observed_at strictly increasing; same-day record replaces.
template <typename Snap>
bool merge_snapshot(std::vector<Snap>& list, Snap&& snap) {
  auto it = std::lower_bound(list.begin(), list.end(), snap.observed_at,
                             [](const Snap& s, Date d) { return s.observed_at < d; });
  if (it != list.end() && it->observed_at == snap.observed_at) {
    *it = std::move(snap);
    return true;  // replaced an existing record
  }
  list.insert(it, std::move(snap));
  return false;
}

}  // namespace

struct DomainStore::Impl {
  mutable std::shared_mutex mu;
  std::map<std::string, DomainHistory> domains;
  std::map<std::string, std::vector<AttackEvent>> attacks;
  fs::path dir;  // empty when in-memory only

  bool bound() const { return !dir.empty(); }

  // Applies one parsed record to memory. Returns true if it replaced
  // an already-stored record (duplicate key / identical attack).
  bool merge(ParsedRecord&& rec) {
    if (auto* w = std::get_if<WhoisLine>(&rec)) {
      auto& h = domains[w->fqdn];
      h.fqdn = w->fqdn;
      return merge_snapshot(h.whois, std::move(w->snapshot));
    }
    if (auto* s = std::get_if<SoaLine>(&rec)) {
      auto& h = domains[s->fqdn];
      h.fqdn = s->fqdn;
      return merge_snapshot(h.soa, std::move(s->snapshot));
    }
    if (auto* t = std::get_if<TlsLine>(&rec)) {
      auto& h = domains[t->fqdn];
      h.fqdn = t->fqdn;
      return merge_snapshot(h.tls, std::move(t->snapshot));
    }
    auto& a = std::get<AttackLine>(rec);
    auto& list = attacks[a.fqdn];
    auto it = std::lower_bound(list.begin(), list.end(), a.event,
                               [](const AttackEvent& x, const AttackEvent& y) {
                                 return x.date != y.date ? x.date < y.date : x.kind < y.kind;
                               });
    if (it != list.end() && *it == a.event) return true;
    list.insert(it, a.event);
    return false;
  }

  void load_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) return;  // absent log is fine
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto res = parse_record_line(line);
      if (!res.record)
        throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                                 ": corrupt store record: " + res.error);
      merge(std::move(*res.record));
    }
  }
};

DomainStore::DomainStore() : impl_(std::make_unique<Impl>()) {}
DomainStore::~DomainStore() = default;
DomainStore::DomainStore(DomainStore&&) noexcept = default;
DomainStore& DomainStore::operator=(DomainStore&&) noexcept = default;

DomainStore DomainStore::open(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot open store directory " + dir.string());
  DomainStore store;
  store.impl_->dir = dir;
  store.impl_->load_file(dir / kIndexName);
  for (const char* log : kLogNames) store.impl_->load_file(dir / log);
  return store;
}

IngestSummary DomainStore::ingest(std::istream& in) {
  IngestSummary sum;
  std::string pending[4];  // canonical lines to append, per source log
  std::string line;
  long lineno = 0;
  std::unique_lock lock(impl_->mu);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++sum.lines;
    auto res = parse_record_line(line);
    if (!res.record) {
      ++sum.rejected;
      if (sum.errors.size() < kMaxErrorSamples)
        sum.errors.push_back("line " + std::to_string(lineno) + ": " + res.error);
      continue;
    }
    // Re-serialize so the logs always hold canonical, normalized lines.
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, WhoisLine>) {
            ++sum.whois;
            pending[0] += serialize_whois(r.fqdn, r.snapshot) + '\n';
          } else if constexpr (std::is_same_v<T, SoaLine>) {
            ++sum.soa;
            pending[1] += serialize_soa(r.fqdn, r.snapshot) + '\n';
          } else if constexpr (std::is_same_v<T, TlsLine>) {
            ++sum.tls;
            pending[2] += serialize_tls(r.fqdn, r.snapshot) + '\n';
          } else {
            ++sum.attacks;
            pending[3] += serialize_attack(r.fqdn, r.event) + '\n';
          }
        },
        *res.record);
    if (impl_->merge(std::move(*res.record))) ++sum.duplicates;
  }
  if (impl_->bound()) {
    for (int i = 0; i < 4; ++i) {
      if (pending[i].empty()) continue;
      std::ofstream out(impl_->dir / kLogNames[i], std::ios::app | std::ios::binary);
      if (!out) throw std::runtime_error("cannot append to store log " + std::string(kLogNames[i]));
      out.write(pending[i].data(), static_cast<std::streamsize>(pending[i].size()));
    }
  }
  return sum;
}

IngestSummary DomainStore::ingest_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read input file " + file.string());
  return ingest(in);
}

std::optional<DomainHistory> DomainStore::history(const std::string& fqdn) const {
  std::shared_lock lock(impl_->mu);
  auto it = impl_->domains.find(fqdn);
  if (it == impl_->domains.end()) return std::nullopt;
  return it->second;
}

std::vector<AttackEvent> DomainStore::attacks(const std::string& fqdn) const {
  std::shared_lock lock(impl_->mu);
  auto it = impl_->attacks.find(fqdn);
  if (it == impl_->attacks.end()) return {};
  return it->second;
}

std::vector<std::string> DomainStore::fqdns() const {
  std::shared_lock lock(impl_->mu);
  std::vector<std::string> out;
  out.reserve(impl_->domains.size() + impl_->attacks.size());
  for (const auto& [name, _] : impl_->domains) out.push_back(name);
  for (const auto& [name, _] : impl_->attacks)
    if (!impl_->domains.contains(name)) out.push_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t DomainStore::domain_count() const {
  std::shared_lock lock(impl_->mu);
  return impl_->domains.size();
}

bool DomainStore::has_any_attacks() const {
  std::shared_lock lock(impl_->mu);
  return !impl_->attacks.empty();
}

void DomainStore::compact() {
  std::unique_lock lock(impl_->mu);
  if (!impl_->bound()) return;
  std::ostringstream out;
  // Consolidated per-domain form: every record of a domain on adjacent lines.
  for (const auto& [fqdn, h] : impl_->domains) {
    for (const auto& s : h.whois) out << serialize_whois(fqdn, s) << '\n';
    for (const auto& s : h.soa) out << serialize_soa(fqdn, s) << '\n';
    for (const auto& s : h.tls) out << serialize_tls(fqdn, s) << '\n';
    if (auto it = impl_->attacks.find(fqdn); it != impl_->attacks.end())
      for (const auto& e : it->second) out << serialize_attack(fqdn, e) << '\n';
  }
  for (const auto& [fqdn, events] : impl_->attacks) {
    if (impl_->domains.contains(fqdn)) continue;
    for (const auto& e : events) out << serialize_attack(fqdn, e) << '\n';
  }
  write_file_atomic(impl_->dir / kIndexName, out.str());
  for (const char* log : kLogNames) {
    std::ofstream trunc(impl_->dir / log, std::ios::trunc);
  }
}

}  // namespace drisk
