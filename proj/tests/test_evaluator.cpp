#include <doctest.h>

#include <sstream>
#include <stdexcept>
#include <vector>

#include "domainrisk/evaluator.hpp"

using namespace drisk;

namespace {

Date d(const char* iso) { return *Date::parse(iso); }

RiskTimeline risk_of(const char* fqdn, std::vector<std::pair<const char*, double>> points) {
  RiskTimeline rt;
  rt.fqdn = fqdn;
  rt.model_id = "test";
  for (const auto& [iso, p] : points) rt.points.push_back(RiskPoint{d(iso), p, {}, {}, {}});
  return rt;
}

// The four canonical outcomes at threshold 0.5:
//   tp.test  crosses on 07-05, attack 07-20  -> detected ahead of time
//   fn.test  crosses only after its attack   -> missed
//   fp.test  benign but crosses              -> false alarm
//   tn.test  benign and quiet                -> clean
std::vector<WindowRisk> handcrafted_four() {
  std::vector<WindowRisk> out(4);
  out[0].fqdn = "tp.test";
  out[0].risk = risk_of("tp.test", {{"2023-07-01", 0.1}, {"2023-07-05", 0.9}});
  out[0].window_attacks = {{d("2023-07-20"), AttackKind::phishing}};
  out[1].fqdn = "fn.test";
  out[1].risk = risk_of("fn.test", {{"2023-07-01", 0.2}, {"2023-07-25", 0.8}});
  out[1].window_attacks = {{d("2023-07-10"), AttackKind::malware}};
  out[2].fqdn = "fp.test";
  out[2].risk = risk_of("fp.test", {{"2023-07-02", 0.7}});
  out[3].fqdn = "tn.test";
  out[3].risk = risk_of("tn.test", {{"2023-07-02", 0.3}, {"2023-08-01", 0.4}});
  return out;
}

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("judge_domain: detection must precede the first attack") {
  RiskTimeline rt = risk_of("m.test", {{"2023-07-01", 0.2}, {"2023-07-08", 0.9},
                                       {"2023-07-15", 0.95}});
  const std::vector<AttackEvent> attacks = {{d("2023-07-10"), AttackKind::malware}};

  DomainOutcome out = judge_domain(rt, attacks, 0.5);
  CHECK(out.verdict == Verdict::TP);
  CHECK(out.detection_time == d("2023-07-08"));  // earliest crossing
  CHECK(out.first_attack == d("2023-07-10"));
  CHECK(out.kind == AttackKind::malware);

  // Detection on the attack day itself is too late.
  const std::vector<AttackEvent> same_day = {{d("2023-07-08"), AttackKind::malware}};
  CHECK(judge_domain(rt, same_day, 0.5).verdict == Verdict::FN);

  // A higher threshold pushes the crossing past the attack.
  CHECK(judge_domain(rt, attacks, 0.92).verdict == Verdict::FN);
}

TEST_CASE("judge_domain: benign verdicts") {
  RiskTimeline quiet = risk_of("b.test", {{"2023-07-01", 0.2}, {"2023-07-08", 0.4}});
  CHECK(judge_domain(quiet, {}, 0.5).verdict == Verdict::TN);
  CHECK_FALSE(judge_domain(quiet, {}, 0.5).detection_time.has_value());
  CHECK(judge_domain(quiet, {}, 0.4).verdict == Verdict::FP);  // >= threshold fires
  RiskTimeline empty;
  empty.fqdn = "empty.test";
  CHECK(judge_domain(empty, {}, 0.5).verdict == Verdict::TN);
}

TEST_CASE("compute_ratios handles empty denominators") {
  Ratios r = compute_ratios(0, 0, 0, 0);
  CHECK_FALSE(r.fpr);
  CHECK_FALSE(r.precision);
  CHECK_FALSE(r.recall);
  CHECK_FALSE(r.f1);

  r = compute_ratios(3, 1, 1, 9);
  CHECK(*r.fpr == doctest::Approx(0.1));
  CHECK(*r.precision == doctest::Approx(0.75));
  CHECK(*r.recall == doctest::Approx(0.75));
  CHECK(*r.f1 == doctest::Approx(0.75));

  r = compute_ratios(0, 5, 0, 5);  // nothing detected
  CHECK(*r.recall == 0.0);
  CHECK_FALSE(r.precision);  // tp + fp == 0
  CHECK_FALSE(r.f1);
}

TEST_CASE("handcrafted quartet yields one of each verdict and 0.5 ratios") {
  EvalReport rep = judge_all(handcrafted_four(), 0.5);
  CHECK(rep.tp == 1);
  CHECK(rep.fn == 1);
  CHECK(rep.fp == 1);
  CHECK(rep.tn == 1);
  CHECK(rep.evaluated == 4);
  CHECK(rep.excluded == 0);
  CHECK(*rep.ratios.fpr == doctest::Approx(0.5));
  CHECK(*rep.ratios.precision == doctest::Approx(0.5));
  CHECK(*rep.ratios.recall == doctest::Approx(0.5));
  CHECK(*rep.ratios.f1 == doctest::Approx(0.5));
  REQUIRE(rep.per_kind.count("phishing"));
  CHECK(rep.per_kind.at("phishing").tp == 1);
  REQUIRE(rep.per_kind.count("malware"));
  CHECK(rep.per_kind.at("malware").fn == 1);
  CHECK(*rep.per_kind.at("malware").recall == 0.0);
}

TEST_CASE("excluded domains are counted but never judged") {
  std::vector<WindowRisk> risks = handcrafted_four();
  WindowRisk outside;
  outside.fqdn = "old.test";
  outside.excluded = true;  // its only attacks predate the window
  risks.push_back(outside);
  EvalReport rep = judge_all(risks, 0.5);
  CHECK(rep.evaluated == 4);
  CHECK(rep.excluded == 1);
  CHECK(rep.tp + rep.fn + rep.fp + rep.tn == 4);
}

TEST_CASE("detections fall monotonically as the threshold rises") {
  const std::vector<WindowRisk> risks = handcrafted_four();
  long prev_tp = 1000, prev_fp = 1000;
  for (int i = 0; i < 20; ++i) {
    const double threshold = 0.05 * i;
    EvalReport rep = judge_all(risks, threshold);
    CHECK(rep.tp <= prev_tp);
    CHECK(rep.fp <= prev_fp);
    prev_tp = rep.tp;
    prev_fp = rep.fp;
  }
}

TEST_CASE("split windows validate ordering") {
  SplitWindows ok{d("2023-06-30"), d("2023-07-01"), d("2023-09-30")};
  CHECK_NOTHROW(ok.validate());
  SplitWindows overlap{d("2023-07-01"), d("2023-07-01"), d("2023-09-30")};
  CHECK_THROWS_AS(overlap.validate(), std::invalid_argument);
  SplitWindows inverted{d("2023-06-30"), d("2023-09-30"), d("2023-07-01")};
  CHECK_THROWS_AS(inverted.validate(), std::invalid_argument);
}

TEST_CASE("csv report rounds percentages and leaves absent ratios empty") {
  EvalReport rep = judge_all(handcrafted_four(), 0.5);
  rep.feature_set = "all";
  rep.n_days = 7;
  const std::string csv = report_csv(std::vector<EvalReport>{rep});
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "parameter,fpr,precision,recall,f1");
  CHECK(row == "features=all n=7 threshold=0.50,50.00%,50.00%,50.00%,50.00%");

  EvalReport empty;  // no domains at all: every ratio is absent
  const std::string blank = report_csv(std::vector<EvalReport>{empty});
  std::istringstream blines(blank);
  std::getline(blines, header);
  std::getline(blines, row);
  CHECK(row == "features=all n=7 threshold=0.50,,,,");
}

TEST_CASE("json report carries counts, ratios and per-kind recall") {
  EvalReport rep = judge_all(handcrafted_four(), 0.5);
  rep.train_rows = 123;
  rep.train_positive_rows = 9;
  nlohmann::json doc = report_json(std::vector<EvalReport>{rep});
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 1);
  const auto& j = doc[0];
  CHECK(j["tp"] == 1);
  CHECK(j["fn"] == 1);
  CHECK(j["fp"] == 1);
  CHECK(j["tn"] == 1);
  CHECK(j["recall"].get<double>() == doctest::Approx(0.5));
  CHECK(j["train_rows"] == 123);
  CHECK(j["train_positive_rows"] == 9);
  CHECK(j["per_kind"]["phishing"]["tp"] == 1);
  CHECK(j["per_kind"]["malware"]["recall"].get<double>() == doctest::Approx(0.0));

  EvalReport empty;
  nlohmann::json blank = report_json(std::vector<EvalReport>{empty});
  CHECK(blank[0]["recall"].is_null());  // absent ratio -> null, not 0
}

}  // TEST_SUITE
