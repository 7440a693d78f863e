#include "domainrisk/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>

#include "domainrisk/record_io.hpp"

namespace drisk {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Date last_record_date(const DomainHistory& h) {
  Date last(std::numeric_limits<int>::min());
  for (const auto& s : h.whois) last = std::max(last, s.observed_at);
  for (const auto& s : h.soa) last = std::max(last, s.observed_at);
  for (const auto& s : h.tls) last = std::max(last, s.observed_at);
  return last;
}

std::vector<NamedContribution> to_named(const std::vector<RankedFeature>& ranked,
                                        const std::vector<std::string>& names) {
  std::vector<NamedContribution> out;
  out.reserve(ranked.size());
  for (const auto& r : ranked) out.push_back({names[r.index], r.value});
  return out;
}

FeatureSetSelector selector_of(const TreeEnsemble& model) {
  auto sel = FeatureSetSelector::parse(model.feature_set);
  if (!sel) throw std::runtime_error("model has unknown feature_set '" + model.feature_set + "'");
  if (sel->dims() != model.feature_count)
    throw std::runtime_error("model feature_count does not match its feature_set");
  return *sel;
}

}  // namespace

std::string double_to_string(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string model_id_of(const TreeEnsemble& model) {
  // Serializing the ensemble dominates; cache per model object so per-domain
  // prediction loops do not re-serialize hundreds of trees each call.
  if (model.id_cache.empty() || model.id_cache_trees != model.trees.size()) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(model.save_string())));
    model.id_cache = buf;
    model.id_cache_trees = model.trees.size();
  }
  return model.id_cache;
}

TimelineConfig timeline_config_for(const DomainHistory& history, const PipelineConfig& cfg,
                                   std::optional<Date> extend_to) {
  TimelineConfig tc;
  tc.grid_step_days = cfg.grid_step_days;
  tc.include_change_dates = cfg.include_change_dates;
  Date horizon = history.empty() ? (extend_to ? *extend_to : Date()) : last_record_date(history);
  if (extend_to && *extend_to > horizon) horizon = *extend_to;
  tc.horizon_end = horizon;
  return tc;
}

RiskTimeline predict_risk_timeline(const DomainHistory& history, const TreeEnsemble& model,
                                   const PipelineConfig& cfg, double threshold, int n_days,
                                   bool explain, int k, std::optional<Date> extend_to,
                                   std::optional<Date> skip_before) {
  FeatureSetSelector sel = selector_of(model);
  RiskTimeline risk;
  risk.fqdn = history.fqdn;
  risk.model_id = model_id_of(model);
  risk.threshold = threshold;
  risk.n_days = n_days;
  if (history.empty()) return risk;

  const std::vector<std::string> names = selected_feature_names(sel);
  DomainTimeline timeline = build_timeline(history, timeline_config_for(history, cfg, extend_to));
  std::optional<ShapEngine> engine;
  if (explain) engine.emplace(model);
  risk.points.reserve(timeline.size());
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    if (skip_before && timeline.date_at(i) < *skip_before) continue;
    const EvaluationPoint point = timeline[i];
    const std::vector<double> x = project(extract_features(point), sel);
    RiskPoint rp;
    rp.t = point.t;
    rp.probability = model.predict_proba(x);
    if (explain) {
      const Attribution attr = engine->explain(x);
      rp.base_value = attr.base_value;
      TopContributions tops = top_k(attr, k);
      rp.top_positive = to_named(tops.positive, names);
      rp.top_negative = to_named(tops.negative, names);
    }
    risk.points.push_back(std::move(rp));
  }
  return risk;
}

void clip_to_window(RiskTimeline& risk, Date start, Date end) {
  std::erase_if(risk.points, [&](const RiskPoint& p) { return p.t < start || p.t > end; });
}

nlohmann::json risk_timeline_to_json(const RiskTimeline& risk) {
  nlohmann::json doc;
  doc["fqdn"] = risk.fqdn;
  doc["model_id"] = risk.model_id;
  doc["threshold"] = risk.threshold;
  doc["n_days"] = risk.n_days;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : risk.points) {
    nlohmann::json jp;
    jp["t"] = p.t.to_string();
    jp["probability"] = p.probability;
    if (p.base_value) {
      jp["base_value"] = *p.base_value;
      nlohmann::json pos = nlohmann::json::array(), neg = nlohmann::json::array();
      for (const auto& c : p.top_positive) pos.push_back({c.name, c.value});
      for (const auto& c : p.top_negative) neg.push_back({c.name, c.value});
      jp["top_positive"] = std::move(pos);
      jp["top_negative"] = std::move(neg);
    }
    points.push_back(std::move(jp));
  }
  doc["points"] = std::move(points);
  return doc;
}

RiskTimeline risk_timeline_from_json(const nlohmann::json& doc) {
  try {
    RiskTimeline risk;
    risk.fqdn = doc.at("fqdn").get<std::string>();
    risk.model_id = doc.value("model_id", std::string());
    risk.threshold = doc.value("threshold", 0.5);
    risk.n_days = doc.value("n_days", 7);
    for (const auto& jp : doc.at("points")) {
      RiskPoint p;
      auto t = Date::parse(jp.at("t").get<std::string>());
      if (!t) throw std::runtime_error("bad point date");
      p.t = *t;
      p.probability = jp.at("probability").get<double>();
      if (jp.contains("base_value")) {
        p.base_value = jp["base_value"].get<double>();
        for (const auto& c : jp.value("top_positive", nlohmann::json::array()))
          p.top_positive.push_back({c.at(0).get<std::string>(), c.at(1).get<double>()});
        for (const auto& c : jp.value("top_negative", nlohmann::json::array()))
          p.top_negative.push_back({c.at(0).get<std::string>(), c.at(1).get<double>()});
      }
      risk.points.push_back(std::move(p));
    }
    std::sort(risk.points.begin(), risk.points.end(),
              [](const RiskPoint& a, const RiskPoint& b) { return a.t < b.t; });
    return risk;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed risk timeline JSON: ") + e.what());
  }
}

AttackMap load_attack_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read attack file " + path.string());
  AttackMap map;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto res = parse_record_line(line);
    if (!res.record || !std::holds_alternative<AttackLine>(*res.record))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected an attack record" +
                               (res.error.empty() ? "" : " (" + res.error + ")"));
    const auto& a = std::get<AttackLine>(*res.record);
    map[a.fqdn].push_back(a.event);
  }
  for (auto& [_, events] : map)
    std::sort(events.begin(), events.end(), [](const AttackEvent& x, const AttackEvent& y) {
      return x.date != y.date ? x.date < y.date : x.kind < y.kind;
    });
  return map;
}

std::vector<Date> attack_dates(const std::vector<AttackEvent>& events) {
  std::vector<Date> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.date);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::vector<AttackEvent> merged_attacks(const DomainStore& store, const std::string& fqdn,
                                        const AttackMap* extra) {
  std::vector<AttackEvent> events = store.attacks(fqdn);
  if (extra) {
    if (auto it = extra->find(fqdn); it != extra->end())
      events.insert(events.end(), it->second.begin(), it->second.end());
    std::sort(events.begin(), events.end(), [](const AttackEvent& x, const AttackEvent& y) {
      return x.date != y.date ? x.date < y.date : x.kind < y.kind;
    });
    events.erase(std::unique(events.begin(), events.end()), events.end());
  }
  return events;
}

}  // namespace

std::vector<LabeledRow> export_feature_rows(const DomainStore& store, const PipelineConfig& cfg,
                                            const LabelingConfig& label_cfg,
                                            const std::optional<std::string>& only_fqdn,
                                            const AttackMap* extra_attacks) {
  std::vector<std::string> names;
  if (only_fqdn)
    names.push_back(*only_fqdn);
  else
    names = store.fqdns();

  std::vector<LabeledRow> rows;
  for (const auto& fqdn : names) {
    auto history = store.history(fqdn);
    if (!history) {
      if (only_fqdn) throw std::runtime_error("no records stored for domain " + fqdn);
      continue;
    }
    const TimelineConfig tc = timeline_config_for(*history, cfg, {});
    DomainTimeline timeline = build_timeline(std::move(*history), tc);
    const std::vector<Date> dates = attack_dates(merged_attacks(store, fqdn, extra_attacks));
    auto domain_rows = label_timeline(timeline, dates, label_cfg);
    rows.insert(rows.end(), std::make_move_iterator(domain_rows.begin()),
                std::make_move_iterator(domain_rows.end()));
  }
  return rows;
}

void write_feature_csv(std::ostream& out, const std::vector<LabeledRow>& rows, bool labeled) {
  out << "fqdn,t";
  for (const auto& name : feature_names()) out << ',' << name;
  if (labeled) out << ",label";
  out << '\n';
  for (const auto& row : rows) {
    out << row.fqdn << ',' << row.t.to_string();
    for (double v : row.features) out << ',' << double_to_string(v);
    if (labeled) out << ',' << row.label;
    out << '\n';
  }
}

TrainingData assemble_training_rows(const DomainStore& store, const PipelineConfig& cfg,
                                    const LabelingConfig& label_cfg, Date train_end,
                                    FeatureSetSelector selector, const AttackMap* extra_attacks) {
  TrainingData data;
  data.matrix.cols = static_cast<std::size_t>(selector.dims());
  for (const auto& fqdn : store.fqdns()) {
    auto history = store.history(fqdn);
    if (!history || history->empty()) continue;
    const TimelineConfig tc = timeline_config_for(*history, cfg, train_end);
    DomainTimeline timeline = build_timeline(std::move(*history), tc);

    // Only ground truth known by train_end may label training rows.
    std::vector<Date> dates;
    for (const auto& e : merged_attacks(store, fqdn, extra_attacks))
      if (e.date <= train_end) dates.push_back(e.date);
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());

    for (std::size_t i = 0; i < timeline.size(); ++i) {
      if (timeline.date_at(i) > train_end) break;
      const EvaluationPoint point = timeline[i];
      const int label = label_point(point.t, dates, label_cfg) ? 1 : 0;
      data.matrix.add_row(project(extract_features(point), selector), label);
      data.positive_rows += label;
    }
  }
  if (data.matrix.rows() == 0)
    throw std::invalid_argument("no training rows at or before " + train_end.to_string());
  return data;
}

TreeEnsemble train_from_store(const DomainStore& store, const PipelineConfig& cfg,
                              const LabelingConfig& label_cfg, Date train_end,
                              FeatureSetSelector selector, const TrainConfig& train_cfg,
                              const AttackMap* extra_attacks, TrainLog* log,
                              TrainingData* data_out) {
  TrainingData data =
      assemble_training_rows(store, cfg, label_cfg, train_end, selector, extra_attacks);
  TreeEnsemble model = train(data.matrix, train_cfg, log);
  model.feature_set = selector.to_string();
  if (data_out) *data_out = std::move(data);
  return model;
}

}  // namespace drisk
