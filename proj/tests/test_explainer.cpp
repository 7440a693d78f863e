#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "domainrisk/explainer.hpp"

using namespace drisk;

namespace {

TreeNode split(int feature, double thr, int l, int r, double cover) {
  TreeNode n;
  n.feature = feature;
  n.threshold = thr;
  n.left = l;
  n.right = r;
  n.cover = cover;
  return n;
}

TreeNode leaf(double value, double cover) {
  TreeNode n;
  n.value = value;
  n.cover = cover;
  return n;
}

// Random tree with children-after-parents layout and consistent covers
// (every internal cover is the sum of its children).
Tree random_tree(std::mt19937_64& rng, int features, int max_depth) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> value(0.0, 1.0);
  Tree tree;
  struct Todo {
    int index;
    int depth;
  };
  tree.nodes.push_back(TreeNode{});
  std::vector<Todo> todo{{0, 0}};
  while (!todo.empty()) {
    const Todo cur = todo.back();
    todo.pop_back();
    const bool make_leaf = cur.depth >= max_depth || unit(rng) < 0.35;
    if (make_leaf) {
      tree.nodes[cur.index] = leaf(value(rng), 1.0 + 9.0 * unit(rng));
    } else {
      const int l = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(TreeNode{});
      tree.nodes.push_back(TreeNode{});
      tree.nodes[cur.index] =
          split(static_cast<int>(rng() % features), unit(rng), l, l + 1, 0.0);
      todo.push_back({l, cur.depth + 1});
      todo.push_back({l + 1, cur.depth + 1});
    }
  }
  for (int i = static_cast<int>(tree.nodes.size()) - 1; i >= 0; --i) {
    TreeNode& n = tree.nodes[i];
    if (!n.is_leaf()) n.cover = tree.nodes[n.left].cover + tree.nodes[n.right].cover;
  }
  return tree;
}

TreeEnsemble random_ensemble(std::mt19937_64& rng, int features, int trees, int max_depth) {
  TreeEnsemble model;
  model.feature_count = features;
  std::normal_distribution<double> base(0.0, 0.5);
  model.base_margin = base(rng);
  model.config.learning_rate = 0.3;
  for (int t = 0; t < trees; ++t) model.trees.push_back(random_tree(rng, features, max_depth));
  return model;
}

}  // namespace

TEST_SUITE("explainer") {

TEST_CASE("single stump has a closed-form attribution") {
  TreeEnsemble model;
  model.feature_count = 2;
  model.base_margin = 0.25;
  model.config.learning_rate = 0.5;
  Tree tree;
  tree.nodes = {split(0, 0.5, 1, 2, 100.0), leaf(-2.0, 30.0), leaf(4.0, 70.0)};
  model.trees = {tree};
  const double expect_e = 0.3 * -2.0 + 0.7 * 4.0;  // cover-weighted mean

  const std::vector<double> go_left = {0.0, 9.0};
  Attribution attr = tree_shap(model, go_left);
  CHECK(attr.base_value == doctest::Approx(0.25 + 0.5 * expect_e).epsilon(1e-12));
  REQUIRE(attr.contributions.size() == 2);
  CHECK(attr.contributions[0] == doctest::Approx(0.5 * (-2.0 - expect_e)).epsilon(1e-12));
  CHECK(attr.contributions[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(attr.margin() == doctest::Approx(model.predict_margin(go_left)).epsilon(1e-12));

  const std::vector<double> go_right = {1.0, 9.0};
  attr = tree_shap(model, go_right);
  CHECK(attr.contributions[0] == doctest::Approx(0.5 * (4.0 - expect_e)).epsilon(1e-12));
}

TEST_CASE("two-feature depth-2 tree matches the subset-enumeration oracle") {
  TreeEnsemble model;
  model.feature_count = 2;
  model.base_margin = -0.1;
  model.config.learning_rate = 1.0;
  Tree tree;
  tree.nodes = {split(0, 0.5, 1, 2, 10.0),
                split(1, 0.5, 3, 4, 4.0),
                leaf(3.0, 6.0),
                leaf(-1.0, 1.0),
                leaf(1.0, 3.0)};
  model.trees = {tree};

  for (const std::vector<double> x :
       {std::vector<double>{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}) {
    Attribution fast = tree_shap(model, x);
    Attribution slow = brute_force_shap(model, x);
    CHECK(fast.base_value == doctest::Approx(slow.base_value).epsilon(1e-12));
    for (int j = 0; j < 2; ++j)
      CHECK(fast.contributions[j] == doctest::Approx(slow.contributions[j]).epsilon(1e-12));
    CHECK(fast.margin() == doctest::Approx(model.predict_margin(x)).epsilon(1e-12));
  }
}

TEST_CASE("agrees with brute force on random ensembles") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int features = 2 + static_cast<int>(rng() % 4);  // up to 5
    TreeEnsemble model = random_ensemble(rng, features, 1 + static_cast<int>(rng() % 3), 4);
    std::vector<double> x(features);
    for (double& v : x) v = unit(rng);

    Attribution fast = tree_shap(model, x);
    Attribution slow = brute_force_shap(model, x);
    REQUIRE(fast.contributions.size() == static_cast<std::size_t>(features));
    for (int j = 0; j < features; ++j)
      CHECK(std::abs(fast.contributions[j] - slow.contributions[j]) <= 1e-9);
    CHECK(std::abs(fast.base_value - slow.base_value) <= 1e-9);
    CHECK(std::abs(fast.margin() - model.predict_margin(x)) <= 1e-9);
  }
}

TEST_CASE("attributions of an irrelevant feature are exactly zero") {
  std::mt19937_64 rng(11);
  // All splits use feature 0; feature 1 never appears on any path.
  TreeEnsemble model;
  model.feature_count = 2;
  model.config.learning_rate = 1.0;
  Tree tree;
  tree.nodes = {split(0, 0.3, 1, 2, 12.0), leaf(-1.0, 5.0), leaf(2.5, 7.0)};
  model.trees = {tree, tree};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> x = {unit(rng), unit(rng)};
    CHECK(tree_shap(model, x).contributions[1] == 0.0);
  }
}

TEST_CASE("invalid inputs throw") {
  TreeEnsemble model;
  model.feature_count = 2;
  Tree tree;
  tree.nodes = {split(0, 0.5, 1, 2, 10.0), leaf(1.0, 0.0), leaf(2.0, 10.0)};
  model.trees = {tree};
  CHECK_THROWS_AS(tree_shap(model, std::vector<double>{0.1, 0.2}), std::invalid_argument);

  tree.nodes[1].cover = 5.0;
  model.trees = {tree};
  CHECK_THROWS_AS(tree_shap(model, std::vector<double>{0.1}), std::invalid_argument);
  CHECK_NOTHROW(tree_shap(model, std::vector<double>{0.1, 0.2}));
}

TEST_CASE("top_k drops zeros, sorts by effect, breaks ties on index") {
  Attribution attr;
  attr.base_value = 0.0;
  attr.contributions = {0.5, 0.0, -0.2, 0.5, 0.1, -0.9};
  TopContributions top = top_k(attr, 2);
  REQUIRE(top.positive.size() == 2);
  CHECK(top.positive[0].index == 0);  // ties on 0.5 resolve to the lower index
  CHECK(top.positive[1].index == 3);
  REQUIRE(top.negative.size() == 2);
  CHECK(top.negative[0].index == 5);  // most harmful first
  CHECK(top.negative[1].index == 2);

  TopContributions all = top_k(attr, 10);
  CHECK(all.positive.size() == 3);
  CHECK(all.negative.size() == 2);  // the exact zero never appears
}

}  // TEST_SUITE
