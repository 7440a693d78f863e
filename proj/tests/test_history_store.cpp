#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "domainrisk/history_store.hpp"
#include "domainrisk/record_io.hpp"

using namespace drisk;
namespace fs = std::filesystem;

namespace {

Date d(const char* iso) { return *Date::parse(iso); }

const char* kCorpus =
    R"({"source":"whois","fqdn":"A.Test","observed_at":"2023-01-10","registrar":"reg-a","creation_date":"2015-03-01","expiry_date":"2024-03-01","updated_date":null,"statuses":["ok"]})"
    "\n"
    R"({"source":"soa","fqdn":"a.test","observed_at":"2023-01-12","mname":"ns1.a.test","rname":"admin.a.test","serial":100})"
    "\n"
    R"({"source":"tls","fqdn":"a.test","observed_at":"2023-01-20","issuer_c":"US","issuer_cn":"CA","issuer_o":"Org","not_before":"2023-01-15","not_after":"2023-04-15","subject_cn":"a.test"})"
    "\n"
    R"({"source":"attack","fqdn":"a.test","date":"2023-02-01","kind":"phishing"})"
    "\n"
    R"({"source":"whois","fqdn":"b.test","observed_at":"2023-01-05","registrar":"reg-b","creation_date":null,"expiry_date":null,"updated_date":null,"statuses":[]})"
    "\n";

// A scratch directory that cleans up after the test.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("drisk-store-test-" + std::to_string(++counter) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("history_store") {

TEST_CASE("wire format round-trips through serialize and parse") {
  WhoisSnapshot w;
  w.observed_at = d("2023-03-05");
  w.registrar = "Some Registrar, Inc.";
  w.creation_date = d("2020-01-01");
  w.statuses = {"clientTransferProhibited", "ok"};
  auto parsed = parse_record_line(serialize_whois("x.test", w));
  REQUIRE(parsed.record.has_value());
  const auto& wl = std::get<WhoisLine>(*parsed.record);
  CHECK(wl.fqdn == "x.test");
  CHECK(wl.snapshot.content_equals(w));
  CHECK(wl.snapshot.observed_at == w.observed_at);

  SoaSnapshot s{d("2023-03-06"), "ns1.x.test", "admin.x.test", 42};
  auto sp = parse_record_line(serialize_soa("x.test", s));
  REQUIRE(sp.record.has_value());
  CHECK(std::get<SoaLine>(*sp.record).snapshot.content_equals(s));

  TlsSnapshot t{d("2023-03-07"), "US", "CA", "Org", d("2023-03-01"), d("2023-06-01"), "x.test"};
  auto tp = parse_record_line(serialize_tls("x.test", t));
  REQUIRE(tp.record.has_value());
  CHECK(std::get<TlsLine>(*tp.record).snapshot.content_equals(t));

  AttackEvent a{d("2023-04-01"), AttackKind::malware};
  auto ap = parse_record_line(serialize_attack("x.test", a));
  REQUIRE(ap.record.has_value());
  CHECK(std::get<AttackLine>(*ap.record).event == a);
}

TEST_CASE("parse rejects malformed lines with a reason") {
  CHECK_FALSE(parse_record_line("not json").record);
  CHECK_FALSE(parse_record_line("[1,2,3]").record);
  CHECK_FALSE(parse_record_line(R"({"source":"whois"})").record);
  CHECK_FALSE(parse_record_line(
                  R"({"source":"whois","fqdn":"x.test","observed_at":"2023-13-01","registrar":"r"})")
                  .record);
  CHECK_FALSE(parse_record_line(R"({"source":"dns","fqdn":"x.test"})").record);
  CHECK_FALSE(parse_record_line(R"({"source":"attack","fqdn":"x.test","date":"2023-02-01","kind":"ddos"})")
                  .record);
  CHECK_FALSE(parse_record_line("").record);
  auto r = parse_record_line(R"({"source":"whois","fqdn":"","observed_at":"2023-01-01","registrar":"r"})");
  CHECK_FALSE(r.record);
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("in-memory ingest counts, lower-cases and sorts") {
  DomainStore store;
  std::istringstream in(kCorpus);
  IngestSummary sum = store.ingest(in);
  CHECK(sum.lines == 5);
  CHECK(sum.whois == 2);
  CHECK(sum.soa == 1);
  CHECK(sum.tls == 1);
  CHECK(sum.attacks == 1);
  CHECK(sum.rejected == 0);
  CHECK(sum.accepted() == 5);
  CHECK(store.domain_count() == 2);
  CHECK(store.fqdns() == std::vector<std::string>{"a.test", "b.test"});
  CHECK(store.has_any_attacks());

  auto hist = store.history("a.test");  // "A.Test" was folded
  REQUIRE(hist.has_value());
  CHECK(hist->fqdn == "a.test");
  CHECK(hist->whois.size() == 1);
  CHECK(hist->soa.size() == 1);
  CHECK(hist->tls.size() == 1);
  CHECK(hist->record_count() == 3);

  auto attacks = store.attacks("a.test");
  REQUIRE(attacks.size() == 1);
  CHECK(attacks[0].date == d("2023-02-01"));
  CHECK(attacks[0].kind == AttackKind::phishing);
  CHECK(store.attacks("b.test").empty());
  CHECK_FALSE(store.history("missing.test").has_value());
}

TEST_CASE("rejected lines are counted and reported, not fatal") {
  DomainStore store;
  std::istringstream in(
      "garbage\n"
      "\n"  // blank lines are skipped silently
      R"({"source":"whois","fqdn":"ok.test","observed_at":"2023-01-01","registrar":"r","statuses":[]})"
      "\n");
  IngestSummary sum = store.ingest(in);
  CHECK(sum.lines == 2);
  CHECK(sum.whois == 1);
  CHECK(sum.rejected == 1);
  REQUIRE_FALSE(sum.errors.empty());
  CHECK(sum.errors[0].find("line 1") != std::string::npos);
  CHECK(store.domain_count() == 1);
}

TEST_CASE("duplicate (fqdn, source, day) keys resolve last-writer-wins") {
  DomainStore store;
  std::istringstream in(
      R"({"source":"whois","fqdn":"a.test","observed_at":"2023-01-10","registrar":"first","statuses":["ok"]})"
      "\n"
      R"({"source":"whois","fqdn":"a.test","observed_at":"2023-01-10","registrar":"second","statuses":["ok"]})"
      "\n");
  IngestSummary sum = store.ingest(in);
  CHECK(sum.whois == 2);
  CHECK(sum.duplicates == 1);
  auto hist = store.history("a.test");
  REQUIRE(hist.has_value());
  REQUIRE(hist->whois.size() == 1);
  CHECK(hist->whois[0].registrar == "second");
}

TEST_CASE("histories come back sorted even from shuffled input") {
  DomainStore store;
  std::istringstream in(
      R"({"source":"soa","fqdn":"a.test","observed_at":"2023-03-01","mname":"m","rname":"r","serial":3})"
      "\n"
      R"({"source":"soa","fqdn":"a.test","observed_at":"2023-01-01","mname":"m","rname":"r","serial":1})"
      "\n"
      R"({"source":"soa","fqdn":"a.test","observed_at":"2023-02-01","mname":"m","rname":"r","serial":2})"
      "\n"
      R"({"source":"attack","fqdn":"a.test","date":"2023-06-01","kind":"malware"})"
      "\n"
      R"({"source":"attack","fqdn":"a.test","date":"2023-04-01","kind":"phishing"})"
      "\n");
  store.ingest(in);
  auto hist = store.history("a.test");
  REQUIRE(hist.has_value());
  REQUIRE(hist->soa.size() == 3);
  CHECK(hist->soa[0].serial == 1);
  CHECK(hist->soa[2].serial == 3);
  auto attacks = store.attacks("a.test");
  REQUIRE(attacks.size() == 2);
  CHECK(attacks[0].kind == AttackKind::phishing);  // April sorts first
}

TEST_CASE("disk store survives reopen, with and without compaction") {
  TempDir tmp;
  const fs::path dir = tmp.path / "store";
  {
    DomainStore store = DomainStore::open(dir);
    std::istringstream in(kCorpus);
    store.ingest(in);
  }
  CHECK(fs::exists(dir / "whois.log"));
  {
    DomainStore reopened = DomainStore::open(dir);
    CHECK(reopened.domain_count() == 2);
    auto hist = reopened.history("a.test");
    REQUIRE(hist.has_value());
    CHECK(hist->record_count() == 3);
    CHECK(reopened.attacks("a.test").size() == 1);
    reopened.compact();
    CHECK(fs::file_size(dir / "whois.log") == 0);
    CHECK(fs::exists(dir / "index.jsonl"));
  }
  {
    DomainStore again = DomainStore::open(dir);
    CHECK(again.domain_count() == 2);
    auto hist = again.history("a.test");
    REQUIRE(hist.has_value());
    CHECK(hist->record_count() == 3);
    CHECK(hist->whois[0].registrar == "reg-a");
    CHECK(again.attacks("a.test").size() == 1);
  }
}

TEST_CASE("ingest after compact appends to fresh logs") {
  TempDir tmp;
  const fs::path dir = tmp.path / "store";
  DomainStore store = DomainStore::open(dir);
  std::istringstream first(kCorpus);
  store.ingest(first);
  store.compact();
  std::istringstream more(
      R"({"source":"whois","fqdn":"c.test","observed_at":"2023-05-01","registrar":"reg-c","statuses":["ok"]})"
      "\n");
  store.ingest(more);

  DomainStore reopened = DomainStore::open(dir);
  CHECK(reopened.domain_count() == 3);
  CHECK(reopened.history("c.test").has_value());
  CHECK(reopened.history("a.test")->record_count() == 3);
}

}  // TEST_SUITE
