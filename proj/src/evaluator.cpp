#include "domainrisk/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace drisk {

namespace {

std::optional<double> ratio(long num, long denom) {
  if (denom == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(denom);
}

std::string pct(const std::optional<double>& r) {
  if (!r) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", *r * 100.0);
  return buf;
}

nlohmann::json ratio_json(const std::optional<double>& r) {
  return r ? nlohmann::json(*r) : nlohmann::json(nullptr);
}

std::string threshold_text(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", t);
  return buf;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::TP: return "TP";
    case Verdict::FN: return "FN";
    case Verdict::FP: return "FP";
    case Verdict::TN: return "TN";
  }
  return "TN";
}

DomainOutcome judge_domain(const RiskTimeline& risk, std::span<const AttackEvent> attacks,
                           double threshold) {
  DomainOutcome out;
  out.fqdn = risk.fqdn;
  out.is_malicious = !attacks.empty();
  if (out.is_malicious) {
    out.first_attack = attacks.front().date;
    out.kind = attacks.front().kind;
  }
  for (const auto& p : risk.points) {
    if (p.probability >= threshold) {
      out.detection_time = p.t;
      break;
    }
  }
  if (out.is_malicious)
    out.verdict = out.detection_time && *out.detection_time < *out.first_attack ? Verdict::TP
                                                                                : Verdict::FN;
  else
    out.verdict = out.detection_time ? Verdict::FP : Verdict::TN;
  return out;
}

Ratios compute_ratios(long tp, long fn, long fp, long tn) {
  Ratios r;
  r.fpr = ratio(fp, fp + tn);
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  if (r.precision && r.recall && *r.precision + *r.recall > 0)
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  return r;
}

EvalReport aggregate(std::span<const DomainOutcome> outcomes) {
  EvalReport rep;
  for (const auto& o : outcomes) {
    switch (o.verdict) {
      case Verdict::TP: ++rep.tp; break;
      case Verdict::FN: ++rep.fn; break;
      case Verdict::FP: ++rep.fp; break;
      case Verdict::TN: ++rep.tn; break;
    }
    if (o.is_malicious) {
      KindStats& k = rep.per_kind[drisk::to_string(o.kind)];
      if (o.verdict == Verdict::TP)
        ++k.tp;
      else
        ++k.fn;
    }
  }
  rep.evaluated = static_cast<long>(outcomes.size());
  rep.ratios = compute_ratios(rep.tp, rep.fn, rep.fp, rep.tn);
  for (auto& [_, k] : rep.per_kind) k.recall = ratio(k.tp, k.tp + k.fn);
  return rep;
}

void SplitWindows::validate() const {
  if (predict_end < predict_start)
    throw std::invalid_argument("predict window is inverted");
  if (train_end >= predict_start)
    throw std::invalid_argument("train window must end strictly before the predict window");
}

std::vector<WindowRisk> predict_window(const DomainStore& store, const TreeEnsemble& model,
                                       const SplitWindows& windows, const PipelineConfig& cfg) {
  windows.validate();
  std::vector<WindowRisk> out;
  for (const auto& fqdn : store.fqdns()) {
    WindowRisk wr;
    wr.fqdn = fqdn;
    const std::vector<AttackEvent> all = store.attacks(fqdn);
    for (const auto& e : all)
      if (e.date >= windows.predict_start && e.date <= windows.predict_end)
        wr.window_attacks.push_back(e);
    wr.excluded = !all.empty() && wr.window_attacks.empty();

    if (!wr.excluded) {
      if (auto history = store.history(fqdn); history && !history->empty()) {
        wr.risk = predict_risk_timeline(*history, model, cfg, 0.5, 7, false, 0,
                                        windows.predict_end, windows.predict_start);
        clip_to_window(wr.risk, windows.predict_start, windows.predict_end);
      } else {
        wr.risk.fqdn = fqdn;  // no records: empty timeline
      }
    }
    out.push_back(std::move(wr));
  }
  return out;
}

EvalReport judge_all(std::span<const WindowRisk> risks, double threshold) {
  std::vector<DomainOutcome> outcomes;
  long excluded = 0;
  for (const auto& wr : risks) {
    if (wr.excluded) {
      ++excluded;
      continue;
    }
    outcomes.push_back(judge_domain(wr.risk, wr.window_attacks, threshold));
  }
  EvalReport rep = aggregate(outcomes);
  rep.excluded = excluded;
  rep.threshold = threshold;
  return rep;
}

EvalReport evaluate_model(const DomainStore& store, const TreeEnsemble& model,
                          const SplitWindows& windows, const PipelineConfig& cfg,
                          double threshold, int n_days_echo) {
  const std::vector<WindowRisk> risks = predict_window(store, model, windows, cfg);
  EvalReport rep = judge_all(risks, threshold);
  rep.feature_set = model.feature_set;
  rep.n_days = n_days_echo;
  return rep;
}

std::vector<EvalReport> sweep(const DomainStore& store, const SweepSpec& spec) {
  spec.windows.validate();
  if (spec.feature_sets.empty() || spec.n_values.empty() || spec.thresholds.empty())
    throw std::invalid_argument("sweep grid must have at least one cell on every axis");

  std::vector<EvalReport> reports;
  for (const FeatureSetSelector sel : spec.feature_sets) {
    for (const int n : spec.n_values) {
      LabelingConfig label_cfg = spec.base_label;
      label_cfg.n_days = n;
      TrainingData data;
      TreeEnsemble model = train_from_store(store, spec.pipeline, label_cfg,
                                            spec.windows.train_end, sel, spec.train, nullptr,
                                            nullptr, &data);
      const std::vector<WindowRisk> risks =
          predict_window(store, model, spec.windows, spec.pipeline);
      for (const double threshold : spec.thresholds) {
        EvalReport rep = judge_all(risks, threshold);
        rep.feature_set = sel.to_string();
        rep.n_days = n;
        rep.train_rows = static_cast<long>(data.matrix.rows());
        rep.train_positive_rows = data.positive_rows;
        reports.push_back(std::move(rep));
      }
    }
  }
  return reports;
}

std::string report_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "parameter,fpr,precision,recall,f1\n";
  for (const auto& r : reports) {
    out << "features=" << r.feature_set << " n=" << r.n_days
        << " threshold=" << threshold_text(r.threshold);
    out << ',' << pct(r.ratios.fpr) << ',' << pct(r.ratios.precision) << ','
        << pct(r.ratios.recall) << ',' << pct(r.ratios.f1) << '\n';
  }
  return out.str();
}

nlohmann::json report_json(std::span<const EvalReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["feature_set"] = r.feature_set;
    j["n_days"] = r.n_days;
    j["threshold"] = r.threshold;
    j["tp"] = r.tp;
    j["fn"] = r.fn;
    j["fp"] = r.fp;
    j["tn"] = r.tn;
    j["fpr"] = ratio_json(r.ratios.fpr);
    j["precision"] = ratio_json(r.ratios.precision);
    j["recall"] = ratio_json(r.ratios.recall);
    j["f1"] = ratio_json(r.ratios.f1);
    j["evaluated_domains"] = r.evaluated;
    j["excluded_domains"] = r.excluded;
    j["train_rows"] = r.train_rows;
    j["train_positive_rows"] = r.train_positive_rows;
    nlohmann::json kinds;
    for (const auto& [name, k] : r.per_kind) {
      kinds[name] = {{"tp", k.tp}, {"fn", k.fn}, {"recall", ratio_json(k.recall)}};
    }
    j["per_kind"] = std::move(kinds);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace drisk
