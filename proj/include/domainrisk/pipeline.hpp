#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "domainrisk/explainer.hpp"
#include "domainrisk/history_store.hpp"
#include "domainrisk/labeler.hpp"
#include "domainrisk/tree_model.hpp"

namespace drisk {

// How timelines are laid out, minus the per-domain horizon (computed from
// each history and the window being worked on).
struct PipelineConfig {
  int grid_step_days = 7;
  bool include_change_dates = true;
};

struct NamedContribution {
  std::string name;
  double value = 0.0;
};

struct RiskPoint {
  Date t;
  double probability = 0.0;
  // Present only when explanations were requested.
  std::optional<double> base_value;
  std::vector<NamedContribution> top_positive;
  std::vector<NamedContribution> top_negative;
};

struct RiskTimeline {
  std::string fqdn;
  std::string model_id;
  double threshold = 0.5;
  int n_days = 7;  // advisory: the horizon the model was trained against
  std::vector<RiskPoint> points;  // sorted by t
};

// Short content hash of the canonical model serialization.
std::string model_id_of(const TreeEnsemble& model);

// Timeline horizon for one domain: the latest record date, stretched to
// extend_to when that reaches further.
TimelineConfig timeline_config_for(const DomainHistory& history, const PipelineConfig& cfg,
                                   std::optional<Date> extend_to);

// Risk at every evaluation point of the domain's timeline. When explain is
// set, each point carries base_value and the top-k signed contributions,
// named after the model's projected columns. Points before skip_before are
// omitted without being scored; features at the remaining points still see
// the full record history.
RiskTimeline predict_risk_timeline(const DomainHistory& history, const TreeEnsemble& model,
                                   const PipelineConfig& cfg, double threshold, int n_days,
                                   bool explain = false, int k = 3,
                                   std::optional<Date> extend_to = std::nullopt,
                                   std::optional<Date> skip_before = std::nullopt);

// Drops points outside [start, end].
void clip_to_window(RiskTimeline& risk, Date start, Date end);

nlohmann::json risk_timeline_to_json(const RiskTimeline& risk);
// Throws std::runtime_error on malformed documents.
RiskTimeline risk_timeline_from_json(const nlohmann::json& doc);

using AttackMap = std::map<std::string, std::vector<AttackEvent>>;

// JSONL of attack-source lines; rejects any other source. Throws on parse errors.
AttackMap load_attack_file(const std::filesystem::path& path);

std::vector<Date> attack_dates(const std::vector<AttackEvent>& events);

// Full-schema labeled rows for every domain (or one), timeline horizons at
// each domain's last record. Labels use all known attacks.
std::vector<LabeledRow> export_feature_rows(const DomainStore& store, const PipelineConfig& cfg,
                                            const LabelingConfig& label_cfg,
                                            const std::optional<std::string>& only_fqdn,
                                            const AttackMap* extra_attacks = nullptr);

// Header fqdn,t,<59 names>[,label]; one row per evaluation point.
void write_feature_csv(std::ostream& out, const std::vector<LabeledRow>& rows, bool labeled);

struct TrainingData {
  DataMatrix matrix;
  long positive_rows = 0;
};

// Rows at points dated <= train_end, labeled with attacks dated <= train_end
// (the ground truth actually available at training time), projected through
// the selector. Throws std::invalid_argument if no usable rows exist.
TrainingData assemble_training_rows(const DomainStore& store, const PipelineConfig& cfg,
                                    const LabelingConfig& label_cfg, Date train_end,
                                    FeatureSetSelector selector,
                                    const AttackMap* extra_attacks = nullptr);

TreeEnsemble train_from_store(const DomainStore& store, const PipelineConfig& cfg,
                              const LabelingConfig& label_cfg, Date train_end,
                              FeatureSetSelector selector, const TrainConfig& train_cfg,
                              const AttackMap* extra_attacks = nullptr, TrainLog* log = nullptr,
                              TrainingData* data_out = nullptr);

// Shortest round-trip decimal form (what the CSVs use).
std::string double_to_string(double v);

}  // namespace drisk
