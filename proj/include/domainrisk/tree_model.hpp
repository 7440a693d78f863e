#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drisk {

struct TrainConfig {
  int rounds = 200;
  int max_depth = 6;
  double min_leaf_weight = 20.0;  // minimum total instance weight per leaf
  double l2_lambda = 1.0;
  double learning_rate = 0.1;
  double positive_weight = 1.0;  // optional class-imbalance multiplier
  std::uint64_t seed = 42;       // recorded for provenance; training is exact greedy
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf margin contribution (unscaled by learning rate)
  double cover = 0.0;  // total training weight that reached this node

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0, children after parents

  // Routing rule everywhere: go left iff x[feature] < threshold.
  double leaf_value(std::span<const double> x) const;
  // Cover-weighted mean of leaf values: what the tree predicts on average.
  double expected_value() const;
};

// Row-major labeled training data.
struct DataMatrix {
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<int> labels;

  std::size_t rows() const { return cols ? values.size() / cols : 0; }
  void add_row(std::span<const double> x, int label);
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TreeEnsemble {
  int feature_count = 0;
  std::string feature_set = "all";  // selector the columns were projected with
  double base_margin = 0.0;         // log-odds of the training positive rate
  TrainConfig config;
  std::vector<Tree> trees;

  double predict_margin(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;  // strictly inside (0,1)

  // Versioned plain-text form; numbers carry full round-trip precision, so
  // save -> load -> save is byte-stable.
  void save(std::ostream& out) const;
  std::string save_string() const;
  // Throws ModelFormatError naming the offending tree/node on malformed input.
  static TreeEnsemble load(std::istream& in);
  static TreeEnsemble load_string(const std::string& text);

  // Memoized serialized-form hash (see model_id_of); invalidated when the
  // tree count changes, which covers every mutation the pipeline performs.
  mutable std::string id_cache;
  mutable std::size_t id_cache_trees = static_cast<std::size_t>(-1);
};

struct TrainLog {
  std::vector<double> round_logloss;  // weighted training log-loss after each round
};

// Newton-boosted trees on logistic loss, deterministic exact greedy splits.
// Needs at least one positive and one negative label; throws
// std::invalid_argument otherwise or on inconsistent row lengths.
TreeEnsemble train(const DataMatrix& data, const TrainConfig& config, TrainLog* log = nullptr);

}  // namespace drisk
