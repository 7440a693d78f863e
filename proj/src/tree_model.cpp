#include "domainrisk/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace drisk {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct NodeStats {
  double G = 0, H = 0, C = 0;
};

struct SplitCand {
  double gain;  // initialized to the acceptance floor; strict > keeps ties deterministic
  int feature = -1;
  double threshold = 0;
};

constexpr double kMinGain = 1e-12;

// Grows one tree level-wise against fixed gradients/hessians.
//
// Split search walks each feature's presorted (value, row) column once per
// level, accumulating left-side sums per active node, so candidate
// enumeration is exact over every boundary between distinct values. Ties
// resolve to the lowest feature index, then the lowest threshold, making
// training fully deterministic. Between levels the columns are compacted to
// rows still sitting in splittable nodes; the filter is stable, so per-node
// accumulation order -- and therefore every double -- is unchanged. Node
// aggregates (G/H/cover) and leaf values are recomputed by a plain
// ascending-row pass so they do not depend on the scan order.
struct GHW {
  double g = 0, h = 0, w = 0;
};

class TreeGrower {
 public:
  TreeGrower(const DataMatrix& data, std::vector<std::vector<std::uint32_t>> sorted_rows,
             std::vector<std::vector<double>> sorted_vals, std::span<const GHW> ghw,
             const TrainConfig& cfg)
      : data_(data),
        full_rows_(std::move(sorted_rows)),
        full_vals_(std::move(sorted_vals)),
        ghw_(ghw),
        cfg_(cfg) {
    work_rows_.resize(data_.cols);
    work_vals_.resize(data_.cols);
    for (std::size_t f = 0; f < data_.cols; ++f) {
      work_rows_[f].reserve(data_.rows());
      work_vals_[f].reserve(data_.rows());
    }
  }

  // pos must have one entry per row; on return it holds each row's leaf id.
  Tree grow(std::vector<std::int32_t>& pos) {
    const std::size_t R = data_.rows();
    const std::size_t F = data_.cols;
    Tree tree;
    std::vector<NodeStats> stats;
    auto add_node = [&](const NodeStats& s) {
      tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, 0.0, s.C});
      stats.push_back(s);
      return static_cast<int>(tree.nodes.size()) - 1;
    };

    std::fill(pos.begin(), pos.end(), 0);
    NodeStats root;
    for (std::size_t i = 0; i < R; ++i) {
      root.G += ghw_[i].g;
      root.H += ghw_[i].h;
      root.C += ghw_[i].w;
    }
    add_node(root);
    std::vector<int> active{0};

    for (int depth = 0; depth < cfg_.max_depth && !active.empty(); ++depth) {
      const std::size_t node_count = tree.nodes.size();
      std::vector<char> is_active(node_count, 0);
      for (int n : active) is_active[n] = 1;
      std::vector<SplitCand> best(node_count, SplitCand{kMinGain, -1, 0});

      struct Run {
        double GL = 0, HL = 0, CL = 0;
        double prev = 0;
        bool has_prev = false;
        SplitCand cand{kMinGain, -1, 0};
      };
      std::vector<Run> run(node_count);

      for (std::size_t f = 0; f < F; ++f) {
        for (int n : active) run[n] = Run{};
        const std::uint32_t* rows = depth == 0 ? full_rows_[f].data() : work_rows_[f].data();
        const double* vals = depth == 0 ? full_vals_[f].data() : work_vals_[f].data();
        const std::size_t cnt = depth == 0 ? R : work_rows_[f].size();
        constexpr std::size_t kPrefetch = 16;
        for (std::size_t k = 0; k < cnt; ++k) {
          if (k + kPrefetch < cnt) {
            const std::uint32_t ahead = rows[k + kPrefetch];
            __builtin_prefetch(&pos[ahead]);
            __builtin_prefetch(&ghw_[ahead]);
          }
          const std::uint32_t i = rows[k];
          const std::int32_t n = pos[i];
          if (n < 0 || static_cast<std::size_t>(n) >= node_count || !is_active[n]) continue;
          const double v = vals[k];
          Run& r = run[n];
          if (r.has_prev && v != r.prev) {
            const double CR = stats[n].C - r.CL;
            if (r.CL >= cfg_.min_leaf_weight && CR >= cfg_.min_leaf_weight) {
              const double lam = cfg_.l2_lambda;
              const double GR = stats[n].G - r.GL;
              const double HR = stats[n].H - r.HL;
              const double gain = r.GL * r.GL / (r.HL + lam) + GR * GR / (HR + lam) -
                                  stats[n].G * stats[n].G / (stats[n].H + lam);
              if (gain > r.cand.gain)
                r.cand = {gain, static_cast<int>(f), r.prev + (v - r.prev) / 2};
            }
          }
          const GHW& e = ghw_[i];
          r.GL += e.g;
          r.HL += e.h;
          r.CL += e.w;
          r.prev = v;
          r.has_prev = true;
        }
        for (int n : active)
          if (run[n].cand.feature >= 0 && run[n].cand.gain > best[n].gain) best[n] = run[n].cand;
      }

      std::vector<int> next_active;
      for (int n : active) {
        if (best[n].feature < 0) continue;
        const int left = add_node({});   // may reallocate tree.nodes,
        const int right = add_node({});  // so write back via index only
        tree.nodes[n].feature = best[n].feature;
        tree.nodes[n].threshold = best[n].threshold;
        tree.nodes[n].left = left;
        tree.nodes[n].right = right;
        next_active.push_back(left);
        next_active.push_back(right);
      }
      if (next_active.empty()) break;

      // Route rows into the fresh children and rebuild their stats row-major.
      for (std::size_t i = 0; i < R; ++i) {
        const std::int32_t n = pos[i];
        if (n < 0) continue;
        const TreeNode& node = tree.nodes[n];
        if (node.is_leaf()) continue;
        const int child =
            data_.values[i * F + node.feature] < node.threshold ? node.left : node.right;
        pos[i] = child;
        stats[child].G += ghw_[i].g;
        stats[child].H += ghw_[i].h;
        stats[child].C += ghw_[i].w;
      }
      for (int c : next_active) tree.nodes[c].cover = stats[c].C;

      // Compact the scan columns down to rows that can still split.
      if (depth + 1 < cfg_.max_depth) {
        std::vector<char> splittable(tree.nodes.size(), 0);
        for (int c : next_active) splittable[c] = 1;
        for (std::size_t f = 0; f < F; ++f) {
          const std::uint32_t* rows = depth == 0 ? full_rows_[f].data() : work_rows_[f].data();
          const double* vals = depth == 0 ? full_vals_[f].data() : work_vals_[f].data();
          const std::size_t cnt = depth == 0 ? R : work_rows_[f].size();
          auto& wr = work_rows_[f];
          auto& wv = work_vals_[f];
          if (depth == 0) {
            wr.resize(R);
            wv.resize(R);
          }
          std::size_t o = 0;
          for (std::size_t k = 0; k < cnt; ++k) {
            const std::uint32_t i = rows[k];
            if (!splittable[pos[i]]) continue;
            wr[o] = i;
            wv[o] = vals[k];
            ++o;
          }
          wr.resize(o);
          wv.resize(o);
        }
      }
      active = std::move(next_active);
    }

    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
      TreeNode& node = tree.nodes[n];
      if (!node.is_leaf()) continue;
      const double denom = stats[n].H + cfg_.l2_lambda;
      node.value = denom > 0 ? -stats[n].G / denom : 0.0;
    }
    return tree;
  }

 private:
  const DataMatrix& data_;
  std::vector<std::vector<std::uint32_t>> full_rows_;
  std::vector<std::vector<double>> full_vals_;
  std::span<const GHW> ghw_;
  const TrainConfig& cfg_;
  std::vector<std::vector<std::uint32_t>> work_rows_;
  std::vector<std::vector<double>> work_vals_;
};

}  // namespace

void DataMatrix::add_row(std::span<const double> x, int label) {
  if (cols == 0) cols = x.size();
  if (x.size() != cols) throw std::invalid_argument("inconsistent feature row length");
  if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
  values.insert(values.end(), x.begin(), x.end());
  labels.push_back(label);
}

double Tree::leaf_value(std::span<const double> x) const {
  int i = 0;
  while (!nodes[i].is_leaf())
    i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
  return nodes[i].value;
}

double Tree::expected_value() const {
  if (nodes.empty()) return 0.0;
  std::vector<double> e(nodes.size());
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    const TreeNode& n = nodes[i];
    e[i] = n.is_leaf() ? n.value
                       : (nodes[n.left].cover * e[n.left] + nodes[n.right].cover * e[n.right]) /
                             n.cover;
  }
  return e[0];
}

double TreeEnsemble::predict_margin(std::span<const double> x) const {
  if (feature_count > 0 && x.size() != static_cast<std::size_t>(feature_count))
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " features, model wants " +
                                std::to_string(feature_count));
  double margin = base_margin;
  for (const Tree& tree : trees) margin += config.learning_rate * tree.leaf_value(x);
  return margin;
}

double TreeEnsemble::predict_proba(std::span<const double> x) const {
  return sigmoid(predict_margin(x));
}

TreeEnsemble train(const DataMatrix& data, const TrainConfig& cfg, TrainLog* log) {
  const std::size_t R = data.rows();
  const std::size_t F = data.cols;
  if (F == 0 || R == 0) throw std::invalid_argument("empty training data");
  if (data.labels.size() != R) throw std::invalid_argument("label count != row count");
  if (data.values.size() != R * F) throw std::invalid_argument("ragged feature matrix");
  if (cfg.rounds < 0 || cfg.max_depth < 1 || cfg.learning_rate <= 0 || cfg.l2_lambda < 0 ||
      cfg.min_leaf_weight < 0 || cfg.positive_weight <= 0)
    throw std::invalid_argument("bad training config");

  std::vector<double> w(R);
  double wsum = 0, wpos = 0;
  for (std::size_t i = 0; i < R; ++i) {
    const int y = data.labels[i];
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    w[i] = y ? cfg.positive_weight : 1.0;
    wsum += w[i];
    wpos += y ? w[i] : 0.0;
  }
  if (wpos <= 0 || wpos >= wsum)
    throw std::invalid_argument("training data needs at least one positive and one negative row");

  TreeEnsemble model;
  model.feature_count = static_cast<int>(F);
  model.config = cfg;
  const double p0 = wpos / wsum;
  model.base_margin = std::log(p0 / (1.0 - p0));

  // Per-feature presorted (row, value) columns, computed once; stable sort
  // keeps equal values in row order so every downstream pass is reproducible.
  std::vector<std::vector<std::uint32_t>> sorted_rows(F);
  std::vector<std::vector<double>> sorted_vals(F);
  for (std::size_t f = 0; f < F; ++f) {
    auto& ord = sorted_rows[f];
    ord.resize(R);
    for (std::size_t i = 0; i < R; ++i) ord[i] = static_cast<std::uint32_t>(i);
    std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
      return data.values[a * F + f] < data.values[b * F + f];
    });
    auto& vals = sorted_vals[f];
    vals.resize(R);
    for (std::size_t k = 0; k < R; ++k) vals[k] = data.values[ord[k] * F + f];
  }

  std::vector<double> margin(R, model.base_margin);
  std::vector<GHW> ghw(R);
  std::vector<std::int32_t> pos(R);
  TreeGrower grower(data, std::move(sorted_rows), std::move(sorted_vals), ghw, cfg);

  for (int round = 0; round < cfg.rounds; ++round) {
    for (std::size_t i = 0; i < R; ++i) {
      const double p = sigmoid(margin[i]);
      ghw[i] = {w[i] * (p - data.labels[i]), w[i] * p * (1.0 - p), w[i]};
    }
    Tree tree = grower.grow(pos);
    for (std::size_t i = 0; i < R; ++i)
      margin[i] += cfg.learning_rate * tree.nodes[pos[i]].value;
    model.trees.push_back(std::move(tree));
    if (log) {
      double loss = 0;
      for (std::size_t i = 0; i < R; ++i) {
        const double p = std::clamp(sigmoid(margin[i]), 1e-15, 1.0 - 1e-15);
        loss -= w[i] * (data.labels[i] ? std::log(p) : std::log(1.0 - p));
      }
      log->round_logloss.push_back(loss / wsum);
    }
  }
  return model;
}

void TreeEnsemble::save(std::ostream& out) const {
  out << "domainrisk-model v1\n";
  out << "feature_count " << feature_count << '\n';
  out << "feature_set " << feature_set << '\n';
  out << "base_margin " << fmt(base_margin) << '\n';
  out << "learning_rate " << fmt(config.learning_rate) << '\n';
  out << "rounds " << config.rounds << '\n';
  out << "max_depth " << config.max_depth << '\n';
  out << "min_leaf_weight " << fmt(config.min_leaf_weight) << '\n';
  out << "l2_lambda " << fmt(config.l2_lambda) << '\n';
  out << "positive_weight " << fmt(config.positive_weight) << '\n';
  out << "seed " << config.seed << '\n';
  out << "trees " << trees.size() << '\n';
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto& nodes = trees[t].nodes;
    // Canonical pre-order emission, whatever order the nodes sit in memory.
    std::vector<int> seq;
    seq.reserve(nodes.size());
    std::vector<int> stack;
    if (!nodes.empty()) stack.push_back(0);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      seq.push_back(i);
      if (!nodes[i].is_leaf()) {
        stack.push_back(nodes[i].right);
        stack.push_back(nodes[i].left);
      }
    }
    std::vector<int> newid(nodes.size(), -1);
    for (std::size_t k = 0; k < seq.size(); ++k) newid[seq[k]] = static_cast<int>(k);
    out << "tree " << t << ' ' << seq.size() << '\n';
    for (int i : seq) {
      const TreeNode& n = nodes[i];
      if (n.is_leaf())
        out << "l " << fmt(n.value) << ' ' << fmt(n.cover) << '\n';
      else
        out << "s " << n.feature << ' ' << fmt(n.threshold) << ' ' << newid[n.left] << ' '
            << newid[n.right] << ' ' << fmt(n.cover) << '\n';
    }
  }
  out << "end\n";
}

std::string TreeEnsemble::save_string() const {
  std::ostringstream out;
  save(out);
  return out.str();
}

namespace {

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw ModelFormatError(std::string("truncated model: expected ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// "key value" line with an exact expected key.
std::string expect_kv(std::istream& in, const std::string& key) {
  std::string line = next_line(in, key.c_str());
  if (line.rfind(key + ' ', 0) != 0)
    throw ModelFormatError("expected '" + key + " ...', got '" + line + "'");
  return line.substr(key.size() + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw ModelFormatError("bad number for " + what + ": '" + s + "'");
  }
}

long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw ModelFormatError("bad integer for " + what + ": '" + s + "'");
  }
}

}  // namespace

TreeEnsemble TreeEnsemble::load(std::istream& in) {
  if (next_line(in, "magic") != "domainrisk-model v1")
    throw ModelFormatError("not a domainrisk model file");
  TreeEnsemble m;
  m.feature_count = static_cast<int>(parse_int(expect_kv(in, "feature_count"), "feature_count"));
  m.feature_set = expect_kv(in, "feature_set");
  m.base_margin = parse_double(expect_kv(in, "base_margin"), "base_margin");
  m.config.learning_rate = parse_double(expect_kv(in, "learning_rate"), "learning_rate");
  m.config.rounds = static_cast<int>(parse_int(expect_kv(in, "rounds"), "rounds"));
  m.config.max_depth = static_cast<int>(parse_int(expect_kv(in, "max_depth"), "max_depth"));
  m.config.min_leaf_weight = parse_double(expect_kv(in, "min_leaf_weight"), "min_leaf_weight");
  m.config.l2_lambda = parse_double(expect_kv(in, "l2_lambda"), "l2_lambda");
  m.config.positive_weight = parse_double(expect_kv(in, "positive_weight"), "positive_weight");
  m.config.seed = static_cast<std::uint64_t>(parse_int(expect_kv(in, "seed"), "seed"));
  if (m.feature_count < 0) throw ModelFormatError("negative feature_count");
  const long long tree_count = parse_int(expect_kv(in, "trees"), "trees");
  if (tree_count < 0) throw ModelFormatError("negative tree count");

  for (long long t = 0; t < tree_count; ++t) {
    const std::string ctx = "tree " + std::to_string(t);
    std::istringstream head(next_line(in, "tree header"));
    std::string word;
    long long idx = -1, node_count = -1;
    if (!(head >> word >> idx >> node_count) || word != "tree" || idx != t || node_count < 1)
      throw ModelFormatError("bad header for " + ctx);
    Tree tree;
    tree.nodes.resize(static_cast<std::size_t>(node_count));
    std::vector<int> referenced(static_cast<std::size_t>(node_count), 0);
    for (long long i = 0; i < node_count; ++i) {
      const std::string nctx = ctx + " node " + std::to_string(i);
      std::istringstream ls(next_line(in, "node line"));
      std::string kind;
      ls >> kind;
      TreeNode n;
      if (kind == "s") {
        long long feat = -1, l = -1, r = -1;
        std::string thr, cov;
        if (!(ls >> feat >> thr >> l >> r >> cov)) throw ModelFormatError(nctx + ": malformed split");
        if (feat < 0 || feat >= m.feature_count) throw ModelFormatError(nctx + ": feature out of range");
        if (l <= i || r <= i || l >= node_count || r >= node_count || l == r)
          throw ModelFormatError(nctx + ": bad child indices");
        n.feature = static_cast<int>(feat);
        n.threshold = parse_double(thr, nctx + " threshold");
        n.left = static_cast<int>(l);
        n.right = static_cast<int>(r);
        n.cover = parse_double(cov, nctx + " cover");
        ++referenced[l];
        ++referenced[r];
      } else if (kind == "l") {
        std::string val, cov;
        if (!(ls >> val >> cov)) throw ModelFormatError(nctx + ": malformed leaf");
        n.value = parse_double(val, nctx + " value");
        n.cover = parse_double(cov, nctx + " cover");
      } else {
        throw ModelFormatError(nctx + ": unknown node kind '" + kind + "'");
      }
      if (n.cover <= 0) throw ModelFormatError(nctx + ": cover must be positive");
      std::string extra;
      if (ls >> extra) throw ModelFormatError(nctx + ": trailing tokens");
      tree.nodes[static_cast<std::size_t>(i)] = n;
    }
    for (long long i = 1; i < node_count; ++i)
      if (referenced[i] != 1)
        throw ModelFormatError(ctx + " node " + std::to_string(i) + ": referenced " +
                               std::to_string(referenced[i]) + " times");
    m.trees.push_back(std::move(tree));
  }
  if (next_line(in, "end") != "end") throw ModelFormatError("missing 'end' terminator");
  return m;
}

TreeEnsemble TreeEnsemble::load_string(const std::string& text) {
  std::istringstream in(text);
  return load(in);
}

}  // namespace drisk
