#include "domainrisk/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "domainrisk/evaluator.hpp"
#include "domainrisk/features.hpp"
#include "domainrisk/fs_util.hpp"
#include "domainrisk/history_store.hpp"
#include "domainrisk/pipeline.hpp"
#include "domainrisk/record_io.hpp"
#include "domainrisk/svg_report.hpp"
#include "domainrisk/synthgen.hpp"
#include "domainrisk/tree_model.hpp"

namespace drisk {
namespace {

const CLI::Validator kDateValidator(
    [](std::string& s) -> std::string {
      if (Date::parse(s)) return {};
      return "expected a YYYY-MM-DD date, got '" + s + "'";
    },
    "DATE");

const CLI::Validator kFeaturesValidator(
    [](std::string& s) -> std::string {
      if (FeatureSetSelector::parse(s)) return {};
      return "expected whois|soa|tls|all or a +-joined combo, got '" + s + "'";
    },
    "FEATURES");

Date date_flag(const std::string& s) { return *Date::parse(s); }

// Artifact sink: --out writes atomically, otherwise the text goes to stdout.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file_atomic(out_path, text);
  }
}

TreeEnsemble load_model_file(const std::string& path) {
  return TreeEnsemble::load_string(read_file(path));
}

// ---- ingest ----------------------------------------------------------------

struct IngestOpts {
  std::string store;
  std::vector<std::string> files;
  bool compact = false;
};

int cmd_ingest(const IngestOpts& o) {
  DomainStore store = DomainStore::open(o.store);
  IngestSummary total;
  auto fold = [&](const IngestSummary& s) {
    total.lines += s.lines;
    total.whois += s.whois;
    total.soa += s.soa;
    total.tls += s.tls;
    total.attacks += s.attacks;
    total.duplicates += s.duplicates;
    total.rejected += s.rejected;
    for (const std::string& e : s.errors) {
      if (total.errors.size() < 10) total.errors.push_back(e);
    }
  };
  if (o.files.empty()) {
    fold(store.ingest(std::cin));
  } else {
    for (const std::string& f : o.files) fold(store.ingest_file(f));
  }
  if (o.compact) store.compact();

  for (const std::string& e : total.errors) std::cerr << "reject: " << e << '\n';
  nlohmann::json summary = {
      {"lines", total.lines},         {"whois", total.whois},
      {"soa", total.soa},             {"tls", total.tls},
      {"attacks", total.attacks},     {"duplicates", total.duplicates},
      {"rejected", total.rejected},   {"domains", store.domain_count()},
  };
  std::cout << summary.dump() << '\n';
  return 0;
}

// ---- synth -----------------------------------------------------------------

struct SynthOpts {
  ScenarioConfig cfg;
  int benign = 0, drop_catch = 0, fresh = 0, lapsed = 0;
  std::string span_start = "2023-01-01", span_end = "2023-09-30";
  std::string out, manifest;
};

int cmd_synth(SynthOpts o) {
  o.cfg.counts = {o.benign, o.drop_catch, o.fresh, o.lapsed};
  o.cfg.span_start = date_flag(o.span_start);
  o.cfg.span_end = date_flag(o.span_end);
  std::ostringstream records;
  nlohmann::json manifest = generate_corpus(o.cfg, records);
  emit(o.out, records.str());
  if (!o.manifest.empty()) write_file_atomic(o.manifest, manifest.dump(2) + "\n");
  std::cerr << "synth: " << o.cfg.counts.total() << " domains, seed " << o.cfg.seed << '\n';
  return 0;
}

// ---- features --------------------------------------------------------------

struct FeaturesOpts {
  std::string store, out, attacks, domain;
  int n = 7;
  int grid_step = 7;
  bool no_change_dates = false;
  bool labeled = false;
};

int cmd_features(const FeaturesOpts& o) {
  DomainStore store = DomainStore::open(o.store);
  AttackMap extra;
  bool labeled = o.labeled;
  if (!o.attacks.empty()) {
    extra = load_attack_file(o.attacks);
    labeled = true;
  }
  const PipelineConfig cfg{o.grid_step, !o.no_change_dates};
  const std::optional<std::string> only =
      o.domain.empty() ? std::nullopt : std::optional<std::string>(o.domain);
  const std::vector<LabeledRow> rows = export_feature_rows(
      store, cfg, LabelingConfig{o.n}, only, o.attacks.empty() ? nullptr : &extra);
  std::ostringstream csv;
  write_feature_csv(csv, rows, labeled);
  emit(o.out, csv.str());
  std::cerr << "features: " << rows.size() << " rows" << (labeled ? " (labeled)" : "") << '\n';
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainOpts {
  std::string store, out, attacks, data_out;
  std::string features = "all";
  std::string train_end;
  int n = 7;
  int grid_step = 7;
  TrainConfig tc;
};

int cmd_train(const TrainOpts& o) {
  DomainStore store = DomainStore::open(o.store);
  AttackMap extra;
  const bool have_extra = !o.attacks.empty();
  if (have_extra) extra = load_attack_file(o.attacks);

  const PipelineConfig cfg{o.grid_step, true};
  const FeatureSetSelector selector = *FeatureSetSelector::parse(o.features);
  TrainLog log;
  TrainingData data;
  const TreeEnsemble model =
      train_from_store(store, cfg, LabelingConfig{o.n}, date_flag(o.train_end), selector,
                       o.tc, have_extra ? &extra : nullptr, &log, &data);
  emit(o.out, model.save_string());
  std::cerr << "train: " << data.matrix.rows() << " rows (" << data.positive_rows
            << " positive), " << model.trees.size() << " trees, final logloss "
            << (log.round_logloss.empty() ? 0.0 : log.round_logloss.back()) << ", model "
            << model_id_of(model) << '\n';
  if (!o.data_out.empty()) {
    std::vector<LabeledRow> rows;  // the projected matrix, for offline inspection
    rows.reserve(data.matrix.rows());
    std::ostringstream csv;
    csv << "label";
    for (const std::string& name : selected_feature_names(selector)) csv << ',' << name;
    csv << '\n';
    for (std::size_t i = 0; i < data.matrix.rows(); ++i) {
      csv << data.matrix.labels[i];
      for (double v : data.matrix.row(i)) csv << ',' << double_to_string(v);
      csv << '\n';
    }
    write_file_atomic(o.data_out, csv.str());
  }
  return 0;
}

// ---- predict ---------------------------------------------------------------

struct PredictOpts {
  std::string store, model, out;
  std::vector<std::string> domains;
  int n = 7;
  double threshold = 0.5;
  bool explain = false;
  int k = 3;
  int grid_step = 7;
  std::string predict_start, predict_end;
};

int cmd_predict(const PredictOpts& o) {
  DomainStore store = DomainStore::open(o.store);
  const TreeEnsemble model = load_model_file(o.model);
  const PipelineConfig cfg{o.grid_step, true};
  std::optional<Date> window_start, window_end;
  if (!o.predict_start.empty()) window_start = date_flag(o.predict_start);
  if (!o.predict_end.empty()) window_end = date_flag(o.predict_end);

  nlohmann::json out = nlohmann::json::array();
  for (const std::string& fqdn : o.domains) {
    const std::optional<DomainHistory> history = store.history(fqdn);
    if (!history || history->empty()) {
      throw std::runtime_error("predict: no records for domain '" + fqdn + "'");
    }
    RiskTimeline risk = predict_risk_timeline(*history, model, cfg, o.threshold, o.n,
                                              o.explain, o.k, window_end);
    if (window_start || window_end) {
      clip_to_window(risk, window_start.value_or(risk.points.front().t),
                     window_end.value_or(risk.points.back().t));
    }
    out.push_back(risk_timeline_to_json(risk));
  }
  const nlohmann::json doc = out.size() == 1 ? out.front() : out;
  emit(o.out, doc.dump(2) + "\n");
  return 0;
}

// ---- explain ---------------------------------------------------------------

struct ExplainOpts {
  std::string store, model, domain, date, out;
  int k = 3;
  int n = 7;
  int grid_step = 7;
};

int cmd_explain(const ExplainOpts& o) {
  DomainStore store = DomainStore::open(o.store);
  const TreeEnsemble model = load_model_file(o.model);
  const std::optional<DomainHistory> history = store.history(o.domain);
  if (!history || history->empty()) {
    throw std::runtime_error("explain: no records for domain '" + o.domain + "'");
  }
  const PipelineConfig cfg{o.grid_step, true};
  std::optional<Date> extend;
  if (!o.date.empty()) extend = date_flag(o.date);
  const RiskTimeline risk =
      predict_risk_timeline(*history, model, cfg, 0.5, o.n, true, o.k, extend);

  // Explain the last evaluation point at or before --date (default: the last).
  const RiskPoint* chosen = nullptr;
  for (const RiskPoint& pt : risk.points) {
    if (extend && pt.t > *extend) break;
    chosen = &pt;
  }
  if (!chosen) {
    throw std::runtime_error("explain: no evaluation point at or before " + o.date);
  }
  nlohmann::json doc = {{"fqdn", risk.fqdn},
                        {"model_id", risk.model_id},
                        {"t", chosen->t.to_string()},
                        {"probability", chosen->probability},
                        {"base_value", *chosen->base_value}};
  auto contribs = [](const std::vector<NamedContribution>& cs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const NamedContribution& c : cs) arr.push_back({{"name", c.name}, {"value", c.value}});
    return arr;
  };
  doc["top_positive"] = contribs(chosen->top_positive);
  doc["top_negative"] = contribs(chosen->top_negative);
  emit(o.out, doc.dump(2) + "\n");
  return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateOpts {
  std::string store, model, out;
  std::string features = "all";
  std::string train_end, predict_start, predict_end;
  int n = 7;
  double threshold = 0.5;
  int grid_step = 7;
  TrainConfig tc;
};

void emit_reports(const std::string& out_prefix, const std::vector<EvalReport>& reports) {
  const std::string csv = report_csv(reports);
  if (out_prefix.empty()) {
    std::cout << csv;
    std::cout.flush();
  } else {
    write_file_atomic(out_prefix + ".csv", csv);
    write_file_atomic(out_prefix + ".json", report_json(reports).dump(2) + "\n");
  }
}

int cmd_evaluate(const EvaluateOpts& o) {
  DomainStore store = DomainStore::open(o.store);
  const SplitWindows windows{date_flag(o.train_end), date_flag(o.predict_start),
                             date_flag(o.predict_end)};
  windows.validate();
  const PipelineConfig cfg{o.grid_step, true};

  TreeEnsemble model;
  long train_rows = 0, train_pos = 0;
  if (!o.model.empty()) {
    model = load_model_file(o.model);
  } else {
    TrainingData data;
    model = train_from_store(store, cfg, LabelingConfig{o.n}, windows.train_end,
                             *FeatureSetSelector::parse(o.features), o.tc, nullptr, nullptr,
                             &data);
    train_rows = static_cast<long>(data.matrix.rows());
    train_pos = data.positive_rows;
  }

  EvalReport report = evaluate_model(store, model, windows, cfg, o.threshold, o.n);
  report.train_rows = train_rows;
  report.train_positive_rows = train_pos;
  emit_reports(o.out, {report});
  std::cerr << "evaluate: tp=" << report.tp << " fn=" << report.fn << " fp=" << report.fp
            << " tn=" << report.tn << " excluded=" << report.excluded << '\n';
  return 0;
}

// ---- sweep -----------------------------------------------------------------

struct SweepOpts {
  std::string store, out;
  std::vector<std::string> features{"all"};
  std::vector<int> n_values{7};
  std::vector<double> thresholds{0.5};
  std::string train_end, predict_start, predict_end;
  int grid_step = 7;
  TrainConfig tc;
};

int cmd_sweep(const SweepOpts& o) {
  DomainStore store = DomainStore::open(o.store);
  SweepSpec spec;
  spec.windows = {date_flag(o.train_end), date_flag(o.predict_start), date_flag(o.predict_end)};
  spec.pipeline = PipelineConfig{o.grid_step, true};
  spec.train = o.tc;
  spec.feature_sets.clear();
  for (const std::string& f : o.features) {
    spec.feature_sets.push_back(*FeatureSetSelector::parse(f));
  }
  spec.n_values = o.n_values;
  spec.thresholds = o.thresholds;
  const std::vector<EvalReport> reports = sweep(store, spec);
  emit_reports(o.out, reports);
  std::cerr << "sweep: " << reports.size() << " cells\n";
  return 0;
}

// ---- report ----------------------------------------------------------------

struct ReportOpts {
  std::string timeline, out;
  int width = 900, height = 320;
};

int cmd_report(const ReportOpts& o) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(o.timeline));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("report: cannot parse timeline JSON: " + std::string(e.what()));
  }
  const RiskTimeline risk = risk_timeline_from_json(doc);
  emit(o.out, render_svg(risk, SvgOptions{o.width, o.height}));
  return 0;
}

void add_train_knobs(CLI::App* sub, TrainConfig& tc) {
  sub->add_option("--rounds", tc.rounds, "Boosting rounds")->check(CLI::PositiveNumber);
  sub->add_option("--depth", tc.max_depth, "Maximum tree depth")->check(CLI::PositiveNumber);
  sub->add_option("--eta", tc.learning_rate, "Learning rate")
      ->check(CLI::Range(1e-6, 1.0));
  sub->add_option("--lambda", tc.l2_lambda, "L2 leaf regularization")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--min-leaf", tc.min_leaf_weight, "Minimum leaf instance weight")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--pos-weight", tc.positive_weight, "Positive-class weight multiplier")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", tc.seed, "Training seed (provenance)");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"domainrisk: lifecycle-aware domain-name risk timelines"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ingest
  IngestOpts ingest_opts;
  CLI::App* s_ingest = app.add_subcommand("ingest", "Load JSONL records into a store");
  s_ingest->add_option("--store", ingest_opts.store, "Store directory")->required();
  s_ingest->add_option("files", ingest_opts.files, "Record files (stdin when omitted)");
  s_ingest->add_flag("--compact", ingest_opts.compact, "Compact the store after loading");
  s_ingest->callback([&] { exit_code = cmd_ingest(ingest_opts); });

  // synth
  SynthOpts synth_opts;
  CLI::App* s_synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  s_synth->add_option("--seed", synth_opts.cfg.seed, "Corpus seed");
  s_synth->add_option("--benign", synth_opts.benign, "Stable benign domains");
  s_synth->add_option("--drop-catch", synth_opts.drop_catch, "Drop-catch malicious domains");
  s_synth->add_option("--fresh", synth_opts.fresh, "Freshly registered malicious domains");
  s_synth->add_option("--lapsed", synth_opts.lapsed, "Formerly malicious, now-silent domains");
  s_synth->add_option("--span-start", synth_opts.span_start, "Corpus start date")
      ->check(kDateValidator);
  s_synth->add_option("--span-end", synth_opts.span_end, "Corpus end date")
      ->check(kDateValidator);
  s_synth->add_option("--whois-poll", synth_opts.cfg.whois_poll_days, "WHOIS poll cadence, days")
      ->check(CLI::PositiveNumber);
  s_synth->add_option("--soa-poll", synth_opts.cfg.soa_poll_days, "SOA poll cadence, days")
      ->check(CLI::PositiveNumber);
  s_synth->add_option("--tls-poll", synth_opts.cfg.tls_poll_days, "TLS poll cadence, days")
      ->check(CLI::PositiveNumber);
  s_synth->add_option("--missing-prob", synth_opts.cfg.missing_field_prob,
                      "Chance an optional whois date is dropped")
      ->check(CLI::Range(0.0, 1.0));
  s_synth->add_option("--jitter", synth_opts.cfg.gap_jitter_days, "Poll jitter, +-days")
      ->check(CLI::NonNegativeNumber);
  s_synth->add_option("--out", synth_opts.out, "Records file (stdout when omitted)");
  s_synth->add_option("--manifest", synth_opts.manifest, "Write fqdn->archetype manifest JSON");
  s_synth->callback([&] {
    if (synth_opts.benign + synth_opts.drop_catch + synth_opts.fresh + synth_opts.lapsed <= 0) {
      throw CLI::ValidationError("synth", "at least one archetype count must be positive");
    }
    exit_code = cmd_synth(synth_opts);
  });

  // features
  FeaturesOpts feat_opts;
  CLI::App* s_features = app.add_subcommand("features", "Export the feature matrix as CSV");
  s_features->add_option("--store", feat_opts.store, "Store directory")->required();
  s_features->add_option("--out", feat_opts.out, "CSV file (stdout when omitted)");
  s_features->add_option("--attacks", feat_opts.attacks, "Attack JSONL for labeling")
      ->check(CLI::ExistingFile);
  s_features->add_option("--domain", feat_opts.domain, "Restrict to one fqdn");
  s_features->add_option("--n", feat_opts.n, "Labeling horizon N, days")
      ->check(CLI::PositiveNumber);
  s_features->add_option("--grid-step", feat_opts.grid_step, "Timeline grid step, days")
      ->check(CLI::PositiveNumber);
  s_features->add_flag("--no-change-dates", feat_opts.no_change_dates,
                       "Grid-only timeline points");
  s_features->add_flag("--labeled", feat_opts.labeled,
                       "Emit the label column from store-resident attacks");
  s_features->callback([&] { exit_code = cmd_features(feat_opts); });

  // train
  TrainOpts train_opts;
  CLI::App* s_train = app.add_subcommand("train", "Train a boosted-tree model");
  s_train->add_option("--store", train_opts.store, "Store directory")->required();
  s_train->add_option("--out", train_opts.out, "Model file (stdout when omitted)");
  s_train->add_option("--attacks", train_opts.attacks, "Extra attack JSONL for labels")
      ->check(CLI::ExistingFile);
  s_train->add_option("--train-end", train_opts.train_end,
                      "Last date training may observe (inclusive)")
      ->required()
      ->check(kDateValidator);
  s_train->add_option("--n", train_opts.n, "Labeling horizon N, days")
      ->check(CLI::PositiveNumber);
  s_train->add_option("--features", train_opts.features, "Feature blocks to train on")
      ->check(kFeaturesValidator);
  s_train->add_option("--grid-step", train_opts.grid_step, "Timeline grid step, days")
      ->check(CLI::PositiveNumber);
  s_train->add_option("--data-out", train_opts.data_out, "Also dump the training matrix CSV");
  add_train_knobs(s_train, train_opts.tc);
  s_train->callback([&] { exit_code = cmd_train(train_opts); });

  // predict
  PredictOpts pred_opts;
  CLI::App* s_predict = app.add_subcommand("predict", "Emit risk timelines for domains");
  s_predict->add_option("--store", pred_opts.store, "Store directory")->required();
  s_predict->add_option("--model", pred_opts.model, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  s_predict->add_option("--domain", pred_opts.domains, "Target fqdn (repeatable)")->required();
  s_predict->add_option("--n", pred_opts.n, "Labeling horizon the model answers for")
      ->check(CLI::PositiveNumber);
  s_predict->add_option("--threshold", pred_opts.threshold, "Alert threshold")
      ->check(CLI::Range(0.0, 1.0));
  s_predict->add_flag("--explain", pred_opts.explain, "Attach per-point attributions");
  s_predict->add_option("--k", pred_opts.k, "Top-k attributions per sign")
      ->check(CLI::PositiveNumber);
  s_predict->add_option("--grid-step", pred_opts.grid_step, "Timeline grid step, days")
      ->check(CLI::PositiveNumber);
  s_predict->add_option("--predict-start", pred_opts.predict_start, "Clip window start")
      ->check(kDateValidator);
  s_predict->add_option("--predict-end", pred_opts.predict_end, "Clip/extend window end")
      ->check(kDateValidator);
  s_predict->add_option("--out", pred_opts.out, "Output JSON file (stdout when omitted)");
  s_predict->callback([&] { exit_code = cmd_predict(pred_opts); });

  // explain
  ExplainOpts expl_opts;
  CLI::App* s_explain = app.add_subcommand("explain", "Attribute one domain at one date");
  s_explain->add_option("--store", expl_opts.store, "Store directory")->required();
  s_explain->add_option("--model", expl_opts.model, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  s_explain->add_option("--domain", expl_opts.domain, "Target fqdn")->required();
  s_explain->add_option("--date", expl_opts.date,
                        "Explain the last point at or before this date (default: last)")
      ->check(kDateValidator);
  s_explain->add_option("--k", expl_opts.k, "Top-k attributions per sign")
      ->check(CLI::PositiveNumber);
  s_explain->add_option("--n", expl_opts.n, "Labeling horizon the model answers for")
      ->check(CLI::PositiveNumber);
  s_explain->add_option("--grid-step", expl_opts.grid_step, "Timeline grid step, days")
      ->check(CLI::PositiveNumber);
  s_explain->add_option("--out", expl_opts.out, "Output JSON file (stdout when omitted)");
  s_explain->callback([&] { exit_code = cmd_explain(expl_opts); });

  // evaluate
  EvaluateOpts eval_opts;
  CLI::App* s_evaluate =
      app.add_subcommand("evaluate", "Temporal-split evaluation of one configuration");
  s_evaluate->add_option("--store", eval_opts.store, "Store directory")->required();
  s_evaluate->add_option("--model", eval_opts.model,
                         "Evaluate this model file instead of training inline")
      ->check(CLI::ExistingFile);
  s_evaluate->add_option("--features", eval_opts.features, "Feature blocks (inline training)")
      ->check(kFeaturesValidator);
  s_evaluate->add_option("--train-end", eval_opts.train_end, "Training cutoff (inclusive)")
      ->required()
      ->check(kDateValidator);
  s_evaluate->add_option("--predict-start", eval_opts.predict_start, "Predict window start")
      ->required()
      ->check(kDateValidator);
  s_evaluate->add_option("--predict-end", eval_opts.predict_end, "Predict window end")
      ->required()
      ->check(kDateValidator);
  s_evaluate->add_option("--n", eval_opts.n, "Labeling horizon N, days")
      ->check(CLI::PositiveNumber);
  s_evaluate->add_option("--threshold", eval_opts.threshold, "Alert threshold")
      ->check(CLI::Range(0.0, 1.0));
  s_evaluate->add_option("--grid-step", eval_opts.grid_step, "Timeline grid step, days")
      ->check(CLI::PositiveNumber);
  s_evaluate->add_option("--out", eval_opts.out,
                         "Report prefix: writes PREFIX.csv and PREFIX.json");
  add_train_knobs(s_evaluate, eval_opts.tc);
  s_evaluate->callback([&] { exit_code = cmd_evaluate(eval_opts); });

  // sweep
  SweepOpts sweep_opts;
  CLI::App* s_sweep = app.add_subcommand("sweep", "Grid sweep over features, N, thresholds");
  s_sweep->add_option("--store", sweep_opts.store, "Store directory")->required();
  s_sweep->add_option("--features", sweep_opts.features, "Feature-set list")
      ->delimiter(',')
      ->check(kFeaturesValidator);
  s_sweep->add_option("--n", sweep_opts.n_values, "Labeling horizons, days")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  s_sweep->add_option("--threshold", sweep_opts.thresholds, "Alert thresholds")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  s_sweep->add_option("--train-end", sweep_opts.train_end, "Training cutoff (inclusive)")
      ->required()
      ->check(kDateValidator);
  s_sweep->add_option("--predict-start", sweep_opts.predict_start, "Predict window start")
      ->required()
      ->check(kDateValidator);
  s_sweep->add_option("--predict-end", sweep_opts.predict_end, "Predict window end")
      ->required()
      ->check(kDateValidator);
  s_sweep->add_option("--grid-step", sweep_opts.grid_step, "Timeline grid step, days")
      ->check(CLI::PositiveNumber);
  s_sweep->add_option("--out", sweep_opts.out,
                      "Report prefix: writes PREFIX.csv and PREFIX.json");
  add_train_knobs(s_sweep, sweep_opts.tc);
  s_sweep->callback([&] { exit_code = cmd_sweep(sweep_opts); });

  // report
  ReportOpts report_opts;
  CLI::App* s_report = app.add_subcommand("report", "Render a risk timeline JSON as SVG");
  s_report->add_option("timeline", report_opts.timeline, "RiskTimeline JSON from predict")
      ->required()
      ->check(CLI::ExistingFile);
  s_report->add_option("--out", report_opts.out, "SVG file (stdout when omitted)");
  s_report->add_option("--width", report_opts.width, "Canvas width, px")
      ->check(CLI::PositiveNumber);
  s_report->add_option("--height", report_opts.height, "Canvas height, px")
      ->check(CLI::PositiveNumber);
  s_report->callback([&] { exit_code = cmd_report(report_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}

}  // namespace drisk
