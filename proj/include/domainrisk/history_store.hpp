#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "domainrisk/records.hpp"

namespace drisk {

struct IngestSummary {
  long lines = 0;       // non-blank input lines seen
  long whois = 0;       // valid lines per source (replacements included)
  long soa = 0;
  long tls = 0;
  long attacks = 0;
  long duplicates = 0;  // lines that replaced an already-stored record
  long rejected = 0;
  std::vector<std::string> errors;  // first few reject reasons, with line numbers

  long accepted() const { return whois + soa + tls + attacks; }
};

// All observed snapshot histories plus attack ground truth, keyed by fqdn.
//
// Threading: many concurrent readers or one writer. Lookups return copies,
// so callers can hang on to a history while the store keeps ingesting.
//
// Disk layout (when opened on a directory): one append log per source
// (whois.log, soa.log, tls.log, attack.log) holding canonical record lines
// accepted since the last compact, plus index.jsonl, the compacted
// consolidated form grouped by domain. compact() folds the logs into
// index.jsonl and truncates them. A default-constructed store is in-memory.
class DomainStore {
 public:
  DomainStore();
  ~DomainStore();
  DomainStore(DomainStore&&) noexcept;
  DomainStore& operator=(DomainStore&&) noexcept;

  // Creates the directory if needed, then loads index + logs.
  // Throws std::runtime_error on unreadable/corrupt store files.
  static DomainStore open(const std::filesystem::path& dir);

  // Parses JSONL records; invalid lines are counted and skipped, never fatal.
  // Duplicate (fqdn, source, observed_at) keys resolve last-writer-wins.
  IngestSummary ingest(std::istream& in);
  IngestSummary ingest_file(const std::filesystem::path& file);

  std::optional<DomainHistory> history(const std::string& fqdn) const;
  // Sorted by date; empty if none. Same-day events of different kinds are kept.
  std::vector<AttackEvent> attacks(const std::string& fqdn) const;
  // Sorted union of domains having any record or attack.
  std::vector<std::string> fqdns() const;
  std::size_t domain_count() const;
  bool has_any_attacks() const;

  // Rewrites index.jsonl from memory and truncates the append logs.
  void compact();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace drisk
