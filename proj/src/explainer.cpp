#include "domainrisk/explainer.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace drisk {

namespace {

// Hot/cold path bookkeeping for the polynomial-time Shapley recursion.
// pweight tracks the permutation weight of each subset size along the path.
struct PathElement {
  int feature_index = -1;
  double zero_fraction = 0.0;  // cover fraction that flows this way unconditioned
  double one_fraction = 0.0;   // 1 when x itself takes this branch
  double pweight = 0.0;
};

// The recursion divides by small loop counters and by the path fractions in
// its innermost loops; `inv` caches 1/k for the counters and the fraction
// reciprocals are hoisted once per call, keeping the hot loops division-free.

void extend_path(PathElement* path, int depth, double zero_fraction, double one_fraction,
                 int feature_index, const double* inv) {
  path[depth] = {feature_index, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  const double inv_d1 = inv[depth + 1];
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) * inv_d1;
    path[i].pweight = zero_fraction * path[i].pweight * (depth - i) * inv_d1;
  }
}

void unwind_path(PathElement* path, int depth, int index, const double* inv) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  const double d1 = depth + 1;
  if (one_fraction != 0) {
    const double inv_one = 1.0 / one_fraction;
    const double inv_d1 = inv[depth + 1];
    double next_one_portion = path[depth].pweight;
    for (int i = depth - 1; i >= 0; --i) {
      const double tmp = path[i].pweight;
      path[i].pweight = next_one_portion * d1 * inv[i + 1] * inv_one;
      next_one_portion = tmp - path[i].pweight * zero_fraction * (depth - i) * inv_d1;
    }
  } else {
    const double inv_zero = 1.0 / zero_fraction;
    for (int i = depth - 1; i >= 0; --i)
      path[i].pweight = path[i].pweight * d1 * inv_zero * inv[depth - i];
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature_index = path[i + 1].feature_index;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

// Total permutation weight if the element at `index` were unwound, without
// mutating the path. Used when accumulating a leaf's contributions.
double unwound_path_sum(const PathElement* path, int depth, int index, const double* inv) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  const double d1 = depth + 1;
  double total = 0.0;
  if (one_fraction != 0) {
    const double inv_one = 1.0 / one_fraction;
    const double inv_d1 = inv[depth + 1];
    double next_one_portion = path[depth].pweight;
    for (int i = depth - 1; i >= 0; --i) {
      const double tmp = next_one_portion * d1 * inv[i + 1] * inv_one;
      total += tmp;
      next_one_portion = path[i].pweight - tmp * zero_fraction * ((depth - i) * inv_d1);
    }
  } else if (zero_fraction != 0) {
    const double inv_zero = 1.0 / zero_fraction;
    for (int i = depth - 1; i >= 0; --i)
      total += path[i].pweight * inv_zero * (d1 * inv[depth - i]);
  }
  return total;
}

int tree_max_depth(const Tree& tree, int node, int depth) {
  const TreeNode& n = tree.nodes[node];
  if (n.is_leaf()) return depth;
  return std::max(tree_max_depth(tree, n.left, depth + 1),
                  tree_max_depth(tree, n.right, depth + 1));
}

// Scratch and recursion state sized once for the deepest tree it will see,
// then reused across every tree of the ensemble and every explained input.
class ShapWalker {
 public:
  explicit ShapWalker(int max_depth) {
    // One triangular buffer: recursion level k owns k+2 elements starting at
    // its offset. Rows are indexed by recursion level, not by the logical
    // path length: unwinding a repeated feature shortens the path without
    // changing which row holds it, and both children must read that row.
    buf_.resize(static_cast<std::size_t>((max_depth + 2) * (max_depth + 3)) / 2);
    offsets_.resize(max_depth + 2);
    int off = 0;
    for (int k = 0; k <= max_depth + 1; ++k) {
      offsets_[k] = off;
      off += k + 2;
    }
    inv_.resize(max_depth + 3, 0.0);
    for (int k = 1; k <= max_depth + 2; ++k) inv_[k] = 1.0 / k;
  }

  void walk(const Tree& tree, std::span<const double> x, std::span<double> phi) {
    tree_ = &tree;
    x_ = x;
    phi_ = phi;
    recurse(0, 0, 0, 1.0, 1.0, -1);
  }

 private:
  void recurse(int node_index, int level, int unique_depth, double parent_zero_fraction,
               double parent_one_fraction, int parent_feature_index) {
    PathElement* path = buf_.data() + offsets_[level];
    if (level > 0) {
      const PathElement* parent = buf_.data() + offsets_[level - 1];
      std::copy(parent, parent + unique_depth, path);
    }
    extend_path(path, unique_depth, parent_zero_fraction, parent_one_fraction,
                parent_feature_index, inv_.data());

    const TreeNode& node = tree_->nodes[node_index];
    if (node.is_leaf()) {
      for (int i = 1; i <= unique_depth; ++i) {
        const double w = unwound_path_sum(path, unique_depth, i, inv_.data());
        const PathElement& el = path[i];
        phi_[el.feature_index] += w * (el.one_fraction - el.zero_fraction) * node.value;
      }
      return;
    }

    const int hot = x_[node.feature] < node.threshold ? node.left : node.right;
    const int cold = hot == node.left ? node.right : node.left;
    const double hot_zero_fraction = tree_->nodes[hot].cover / node.cover;
    const double cold_zero_fraction = tree_->nodes[cold].cover / node.cover;
    double incoming_zero_fraction = 1.0;
    double incoming_one_fraction = 1.0;

    // The same feature may appear again along the path: undo its previous
    // element and fold its fractions into this occurrence.
    int path_index = 0;
    while (path_index <= unique_depth && path[path_index].feature_index != node.feature)
      ++path_index;
    if (path_index != unique_depth + 1) {
      incoming_zero_fraction = path[path_index].zero_fraction;
      incoming_one_fraction = path[path_index].one_fraction;
      unwind_path(path, unique_depth, path_index, inv_.data());
      unique_depth -= 1;
    }

    recurse(hot, level + 1, unique_depth + 1, hot_zero_fraction * incoming_zero_fraction,
            incoming_one_fraction, node.feature);
    recurse(cold, level + 1, unique_depth + 1, cold_zero_fraction * incoming_zero_fraction, 0.0,
            node.feature);
  }

  const Tree* tree_ = nullptr;
  std::span<const double> x_;
  std::span<double> phi_;
  std::vector<PathElement> buf_;
  std::vector<int> offsets_;
  std::vector<double> inv_;  // inv_[k] = 1/k
};

void validate_input_length(const TreeEnsemble& model, std::span<const double> x) {
  if (model.feature_count > 0 && x.size() != static_cast<std::size_t>(model.feature_count))
    throw std::invalid_argument("input length does not match model feature_count");
}

void validate_covers(const TreeEnsemble& model) {
  for (std::size_t t = 0; t < model.trees.size(); ++t)
    for (std::size_t n = 0; n < model.trees[t].nodes.size(); ++n)
      if (!(model.trees[t].nodes[n].cover > 0))
        throw std::invalid_argument("tree " + std::to_string(t) + " node " + std::to_string(n) +
                                    " has no cover; attribution needs cover metadata");
}

// Cover-weighted expectation of one tree conditioned on the features in
// `mask` taking their values from x — the value function both attribution
// routes share.
double cond_expect(const Tree& tree, int node_index, std::span<const double> x,
                   std::uint32_t mask) {
  const TreeNode& node = tree.nodes[node_index];
  if (node.is_leaf()) return node.value;
  if (node.feature < 32 && (mask >> node.feature & 1u)) {
    const int next = x[node.feature] < node.threshold ? node.left : node.right;
    return cond_expect(tree, next, x, mask);
  }
  return (tree.nodes[node.left].cover * cond_expect(tree, node.left, x, mask) +
          tree.nodes[node.right].cover * cond_expect(tree, node.right, x, mask)) /
         node.cover;
}

}  // namespace

struct ShapEngine::Impl {
  const TreeEnsemble* model;
  double expected_sum = 0.0;  // sum of per-tree expected values, x-independent
  ShapWalker walker;

  Impl(const TreeEnsemble& m, int max_depth) : model(&m), walker(max_depth) {}
};

ShapEngine::ShapEngine(const TreeEnsemble& model) {
  validate_covers(model);
  int max_depth = 0;
  double expected = 0.0;
  for (const Tree& tree : model.trees) {
    if (tree.nodes.empty()) continue;
    max_depth = std::max(max_depth, tree_max_depth(tree, 0, 0));
    expected += tree.expected_value();
  }
  impl_ = std::make_unique<Impl>(model, max_depth);
  impl_->expected_sum = expected;
}

ShapEngine::~ShapEngine() = default;
ShapEngine::ShapEngine(ShapEngine&&) noexcept = default;
ShapEngine& ShapEngine::operator=(ShapEngine&&) noexcept = default;

Attribution ShapEngine::explain(std::span<const double> x) {
  const TreeEnsemble& model = *impl_->model;
  validate_input_length(model, x);
  Attribution attr;
  attr.contributions.assign(x.size(), 0.0);
  for (const Tree& tree : model.trees) {
    if (tree.nodes.empty()) continue;
    impl_->walker.walk(tree, x, attr.contributions);
  }
  const double lr = model.config.learning_rate;
  for (double& c : attr.contributions) c *= lr;
  attr.base_value = model.base_margin + lr * impl_->expected_sum;
  return attr;
}

Attribution tree_shap(const TreeEnsemble& model, std::span<const double> x) {
  return ShapEngine(model).explain(x);
}

Attribution brute_force_shap(const TreeEnsemble& model, std::span<const double> x) {
  validate_input_length(model, x);
  validate_covers(model);
  const int m = static_cast<int>(x.size());
  if (m > 20) throw std::invalid_argument("brute-force enumeration limited to 20 features");

  const std::uint32_t subsets = 1u << m;
  std::vector<double> v(subsets, 0.0);
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    double sum = 0.0;
    for (const Tree& tree : model.trees)
      if (!tree.nodes.empty()) sum += cond_expect(tree, 0, x, mask);
    v[mask] = model.base_margin + model.config.learning_rate * sum;
  }

  // weight(s) = s!(m-s-1)!/m! = 1 / (m * C(m-1, s))
  std::vector<double> weight(m);
  double binom = 1.0;
  for (int s = 0; s < m; ++s) {
    weight[s] = 1.0 / (m * binom);
    binom = binom * (m - 1 - s) / (s + 1);
  }

  Attribution attr;
  attr.base_value = v[0];
  attr.contributions.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const std::uint32_t bit = 1u << i;
    double phi = 0.0;
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      phi += weight[std::popcount(mask)] * (v[mask | bit] - v[mask]);
    }
    attr.contributions[i] = phi;
  }
  return attr;
}

TopContributions top_k(const Attribution& attr, int k) {
  TopContributions out;
  if (k <= 0) return out;
  for (int i = 0; i < static_cast<int>(attr.contributions.size()); ++i) {
    const double c = attr.contributions[i];
    if (c > 0) out.positive.push_back({i, c});
    if (c < 0) out.negative.push_back({i, c});
  }
  auto by_magnitude_desc = [](const RankedFeature& a, const RankedFeature& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
  };
  auto by_value_asc = [](const RankedFeature& a, const RankedFeature& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.index < b.index;
  };
  std::sort(out.positive.begin(), out.positive.end(), by_magnitude_desc);
  std::sort(out.negative.begin(), out.negative.end(), by_value_asc);
  if (out.positive.size() > static_cast<std::size_t>(k)) out.positive.resize(k);
  if (out.negative.size() > static_cast<std::size_t>(k)) out.negative.resize(k);
  return out;
}

}  // namespace drisk
