#include <doctest.h>

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "domainrisk/history_store.hpp"
#include "domainrisk/record_io.hpp"
#include "domainrisk/synthgen.hpp"

using namespace drisk;

namespace {

ScenarioConfig small_config(std::uint64_t seed = 9) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.counts = {25, 8, 8, 4};
  return cfg;
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("same seed gives a byte-identical corpus and manifest") {
  std::ostringstream a, b;
  nlohmann::json ma = generate_corpus(small_config(), a);
  nlohmann::json mb = generate_corpus(small_config(), b);
  CHECK(a.str() == b.str());
  CHECK(ma == mb);
  CHECK_FALSE(a.str().empty());

  std::ostringstream c;
  nlohmann::json mc = generate_corpus(small_config(10), c);
  CHECK(a.str() != c.str());  // a different seed actually changes the stream
}

TEST_CASE("manifest covers every requested domain exactly once") {
  std::ostringstream out;
  nlohmann::json manifest = generate_corpus(small_config(), out);
  REQUIRE(manifest.is_object());
  CHECK(manifest.size() == 45);
  std::map<std::string, int> by_kind;
  for (const auto& [fqdn, kind] : manifest.items()) {
    ++by_kind[kind.get<std::string>()];
    CHECK(fqdn.find(".synth.test") != std::string::npos);
  }
  CHECK(by_kind["stable_benign"] == 25);
  CHECK(by_kind["drop_catch_malicious"] == 8);
  CHECK(by_kind["fresh_malicious"] == 8);
  CHECK(by_kind["lapsed_formerly_malicious"] == 4);
}

TEST_CASE("every emitted line parses as a record inside the span") {
  ScenarioConfig cfg = small_config();
  std::ostringstream out;
  generate_corpus(cfg, out);
  std::istringstream in(out.str());
  std::string line;
  long lines = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lines;
    LineParseResult res = parse_record_line(line);
    const std::string context = res.error + " <- " + line.substr(0, 80);
    REQUIRE_MESSAGE(res.record.has_value(), context);
    std::visit(
        [&](const auto& rec) {
          seen.insert(rec.fqdn);
          using T = std::decay_t<decltype(rec)>;
          if constexpr (std::is_same_v<T, AttackLine>) {
            CHECK(rec.event.date >= cfg.span_start);
            CHECK(rec.event.date <= cfg.span_end);
          } else {
            CHECK(rec.snapshot.observed_at >= cfg.span_start);
            CHECK(rec.snapshot.observed_at <= cfg.span_end);
          }
        },
        *res.record);
  }
  CHECK(lines > 45 * 10);    // each domain polls many times
  CHECK(seen.size() == 45);  // every manifest domain appears in the stream
}

TEST_CASE("archetypes carry their defining shapes") {
  ScenarioConfig cfg = small_config();
  std::ostringstream out;
  nlohmann::json manifest = generate_corpus(cfg, out);
  DomainStore store;
  std::istringstream in(out.str());
  IngestSummary sum = store.ingest(in);
  CHECK(sum.rejected == 0);
  CHECK(store.domain_count() == 45);

  for (const auto& [fqdn, kind_json] : manifest.items()) {
    const std::string kind = kind_json.get<std::string>();
    const auto attacks = store.attacks(fqdn);
    const auto hist = store.history(fqdn);
    REQUIRE(hist.has_value());
    if (kind == "stable_benign") {
      CHECK(attacks.empty());
      CHECK_FALSE(hist->whois.empty());
      CHECK_FALSE(hist->soa.empty());
      CHECK_FALSE(hist->tls.empty());
    } else {
      CHECK_FALSE(attacks.empty());
    }
    if (kind == "drop_catch_malicious") {
      // The lapse plays out in WHOIS: some snapshot carries a lifecycle
      // status, and the registrar changes hands at the capture.
      bool lifecycle = false;
      std::set<std::string> registrars;
      for (const auto& w : hist->whois) {
        registrars.insert(w.registrar);
        for (const auto& s : w.statuses)
          if (s == "autoRenewPeriod" || s == "redemptionPeriod" || s == "pendingDelete")
            lifecycle = true;
      }
      CHECK(lifecycle);
      CHECK(registrars.size() >= 2);
    }
    if (kind == "fresh_malicious") {
      // Short observed life: first record close to the attack.
      Date first = hist->whois.front().observed_at;
      CHECK(attacks.front().date - first <= 70);
    }
  }
}

TEST_CASE("benign and malicious populations are labelable end to end") {
  std::ostringstream out;
  nlohmann::json manifest = generate_corpus(small_config(), out);
  DomainStore store;
  std::istringstream in(out.str());
  store.ingest(in);
  CHECK(store.has_any_attacks());
  long with_attacks = 0;
  for (const auto& fqdn : store.fqdns())
    if (!store.attacks(fqdn).empty()) ++with_attacks;
  CHECK(with_attacks == 20);  // 8 + 8 + 4 malicious archetypes
}

TEST_CASE("invalid configurations throw") {
  ScenarioConfig empty;
  empty.counts = {0, 0, 0, 0};
  std::ostringstream sink;
  CHECK_THROWS_AS(generate_corpus(empty, sink), std::invalid_argument);

  ScenarioConfig inverted = small_config();
  inverted.span_end = inverted.span_start - 1;
  CHECK_THROWS_AS(generate_corpus(inverted, sink), std::invalid_argument);
}

}  // TEST_SUITE
