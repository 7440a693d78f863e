#pragma once

#include <memory>
#include <span>
#include <vector>

#include "domainrisk/tree_model.hpp"

namespace drisk {

// Margin-space attribution: base_value + sum(contributions) equals the
// ensemble's predict_margin(x) for the explained input (local accuracy).
struct Attribution {
  double base_value = 0.0;
  std::vector<double> contributions;  // one per model feature

  double margin() const {
    double m = base_value;
    for (double c : contributions) m += c;
    return m;
  }
};

// Exact Shapley values of the cover-weighted tree expectation, computed in
// polynomial time per tree. Requires cover > 0 on every node; throws
// std::invalid_argument otherwise or on an input-length mismatch.
Attribution tree_shap(const TreeEnsemble& model, std::span<const double> x);

// Reusable attribution context for explaining many inputs against one model:
// cover validation, tree-depth sizing, the expected-value sum and the scratch
// buffers are computed once here instead of per input. explain(x) matches
// tree_shap(model, x) exactly. The model must outlive the engine.
class ShapEngine {
 public:
  explicit ShapEngine(const TreeEnsemble& model);  // throws like tree_shap
  ~ShapEngine();
  ShapEngine(ShapEngine&&) noexcept;
  ShapEngine& operator=(ShapEngine&&) noexcept;

  Attribution explain(std::span<const double> x);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Definitional oracle: enumerates all feature subsets S, conditioning the
// same cover-weighted expectation, and combines the marginal contributions
// with Shapley weights |S|!(M-|S|-1)!/M!. Limited to feature_count <= 20.
Attribution brute_force_shap(const TreeEnsemble& model, std::span<const double> x);

struct RankedFeature {
  int index;
  double value;
};

struct TopContributions {
  std::vector<RankedFeature> positive;  // descending by value
  std::vector<RankedFeature> negative;  // ascending (most harmful first)
};

// Zero contributions never appear; ties break on the lower feature index.
TopContributions top_k(const Attribution& attr, int k);

}  // namespace drisk
