#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domainrisk/pipeline.hpp"

namespace drisk {

enum class Verdict { TP, FN, FP, TN };

std::string to_string(Verdict v);

// Domain-level call over an observation window. A malicious domain counts as
// detected only when some point clears the threshold strictly before its
// first attack; a benign domain is a false positive if any point ever does.
struct DomainOutcome {
  std::string fqdn;
  bool is_malicious = false;
  Verdict verdict = Verdict::TN;
  std::optional<Date> detection_time;  // earliest point with probability >= threshold
  std::optional<Date> first_attack;
  AttackKind kind = AttackKind::other;  // kind of the first in-window attack
};

// attacks must be the domain's attacks inside the observation window, sorted.
DomainOutcome judge_domain(const RiskTimeline& risk, std::span<const AttackEvent> attacks,
                           double threshold);

// Ratios are absent (not zero) when their denominator is empty.
struct Ratios {
  std::optional<double> fpr, precision, recall, f1;
};

Ratios compute_ratios(long tp, long fn, long fp, long tn);

struct KindStats {
  long tp = 0, fn = 0;
  std::optional<double> recall;
};

struct EvalReport {
  long tp = 0, fn = 0, fp = 0, tn = 0;
  Ratios ratios;
  std::map<std::string, KindStats> per_kind;
  long evaluated = 0;  // domains judged
  long excluded = 0;   // attack history entirely outside the window
  // configuration echo
  std::string feature_set = "all";
  int n_days = 7;
  double threshold = 0.5;
  long train_rows = 0;
  long train_positive_rows = 0;
};

EvalReport aggregate(std::span<const DomainOutcome> outcomes);

// Temporal split: training may only see strictly before the predict window.
struct SplitWindows {
  Date train_end;
  Date predict_start;
  Date predict_end;

  // Throws std::invalid_argument when the windows overlap or are inverted.
  void validate() const;
};

// Per-domain probabilities over the predict window, judged at a threshold
// later. Domains whose only attacks fall outside the window are excluded from
// judgment: they are training signal, neither benign nor in-window malicious.
struct WindowRisk {
  std::string fqdn;
  RiskTimeline risk;
  std::vector<AttackEvent> window_attacks;
  bool excluded = false;
};

std::vector<WindowRisk> predict_window(const DomainStore& store, const TreeEnsemble& model,
                                       const SplitWindows& windows, const PipelineConfig& cfg);

EvalReport judge_all(std::span<const WindowRisk> risks, double threshold);

EvalReport evaluate_model(const DomainStore& store, const TreeEnsemble& model,
                          const SplitWindows& windows, const PipelineConfig& cfg,
                          double threshold, int n_days_echo);

struct SweepSpec {
  SplitWindows windows;
  PipelineConfig pipeline;
  TrainConfig train;
  LabelingConfig base_label;  // n_days overridden per cell
  std::vector<FeatureSetSelector> feature_sets{FeatureSetSelector{}};
  std::vector<int> n_values{7};
  std::vector<double> thresholds{0.5};
};

// Trains one model per (feature set, N) cell and reports every threshold.
// Cells appear in feature_sets x n_values x thresholds order.
std::vector<EvalReport> sweep(const DomainStore& store, const SweepSpec& spec);

// parameter,fpr,precision,recall,f1 with ratios as percentages, 2 decimals;
// absent ratios render as empty cells.
std::string report_csv(std::span<const EvalReport> reports);
nlohmann::json report_json(std::span<const EvalReport> reports);

}  // namespace drisk
