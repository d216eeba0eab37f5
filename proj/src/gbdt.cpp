#include "driftgate/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "driftgate/errors.hpp"
#include "driftgate/metrics.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

using nlohmann::json;

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kMinHessian = 1e-12;
constexpr int kMaxOrderedCategories = 32;  // beyond this, one-vs-rest

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// ---------------------------------------------------------------------------
// BoostParams
// ---------------------------------------------------------------------------

void BoostParams::validate() const {
  if (num_boost_round < 0) throw ContractError("num_boost_round must be >= 0");
  if (early_stopping_rounds < 0) throw ContractError("early_stopping_rounds must be >= 0");
  if (!(learning_rate > 0)) throw ContractError("learning_rate must be positive");
  if (max_depth < 1) throw ContractError("max_depth must be >= 1");
  if (num_leaves < 2) throw ContractError("num_leaves must be >= 2");
  if (max_depth < 31 && num_leaves > (1 << max_depth)) {
    throw ContractError("num_leaves must be <= 2^max_depth");
  }
  if (!(colsample_bytree > 0 && colsample_bytree <= 1)) {
    throw ContractError("colsample_bytree must be in (0,1]");
  }
  if (!(subsample > 0 && subsample <= 1)) throw ContractError("subsample must be in (0,1]");
  if (subsample_freq < 0) throw ContractError("subsample_freq must be >= 0");
  if (min_data_in_leaf < 1) throw ContractError("min_data_in_leaf must be >= 1");
  if (l2_reg < 0) throw ContractError("l2_reg must be >= 0");
  if (max_bins < 2) throw ContractError("max_bins must be >= 2");
}

std::string BoostParams::to_json_string() const {
  json j{{"num_boost_round", num_boost_round},
         {"early_stopping_rounds", early_stopping_rounds},
         {"learning_rate", learning_rate},
         {"max_depth", max_depth},
         {"num_leaves", num_leaves},
         {"colsample_bytree", colsample_bytree},
         {"subsample", subsample},
         {"subsample_freq", subsample_freq},
         {"min_data_in_leaf", min_data_in_leaf},
         {"l2_reg", l2_reg},
         {"max_bins", max_bins},
         {"seed", seed}};
  return j.dump(2);
}

BoostParams BoostParams::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("params JSON: ") + e.what());
  }
  BoostParams p;
  p.num_boost_round = j.value("num_boost_round", p.num_boost_round);
  p.early_stopping_rounds = j.value("early_stopping_rounds", p.early_stopping_rounds);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.num_leaves = j.value("num_leaves", p.num_leaves);
  p.colsample_bytree = j.value("colsample_bytree", p.colsample_bytree);
  p.subsample = j.value("subsample", p.subsample);
  p.subsample_freq = j.value("subsample_freq", p.subsample_freq);
  p.min_data_in_leaf = j.value("min_data_in_leaf", p.min_data_in_leaf);
  p.l2_reg = j.value("l2_reg", p.l2_reg);
  p.max_bins = j.value("max_bins", p.max_bins);
  p.seed = j.value("seed", p.seed);
  p.validate();
  return p;
}

BoostParams BoostParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open params file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

void BoostParams::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write params file '" + path + "'");
  out << to_json_string() << "\n";
}

// ---------------------------------------------------------------------------
// Binning
// ---------------------------------------------------------------------------

namespace {

struct BinnedFeature {
  bool categorical = false;
  int n_bins = 0;               // value bins; the missing bin is index n_bins
  std::vector<double> uppers;   // numeric only: raw upper edge per bin
  std::vector<std::uint16_t> bins;  // per-row bin index

  int missing_bin() const { return n_bins; }
};

BinnedFeature bin_numeric(const NumericColumn& col, int max_bins) {
  BinnedFeature bf;
  std::vector<double> present;
  present.reserve(col.values.size());
  for (double v : col.values) {
    if (!is_missing(v)) present.push_back(v);
  }
  std::sort(present.begin(), present.end());

  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : present) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }

  // Bin boundaries as indexes of the last distinct value in each bin.
  std::vector<std::size_t> last_in_bin;
  if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
    for (std::size_t i = 0; i < distinct.size(); ++i) last_in_bin.push_back(i);
  } else {
    std::size_t remaining = present.size();
    int bins_left = max_bins;
    std::size_t acc = 0;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      acc += counts[i];
      const std::size_t target = (remaining + bins_left - 1) / bins_left;
      if ((acc >= target && bins_left > 1 && i + 1 < distinct.size()) ||
          i + 1 == distinct.size()) {
        last_in_bin.push_back(i);
        remaining -= acc;
        acc = 0;
        --bins_left;
      }
    }
  }

  bf.n_bins = static_cast<int>(last_in_bin.size());
  bf.uppers.resize(last_in_bin.size());
  for (std::size_t b = 0; b < last_in_bin.size(); ++b) {
    if (b + 1 < last_in_bin.size()) {
      double hi = distinct[last_in_bin[b]];
      double next_lo = distinct[last_in_bin[b] + 1];
      bf.uppers[b] = hi / 2.0 + next_lo / 2.0;
    } else {
      bf.uppers[b] = std::numeric_limits<double>::infinity();
    }
  }

  bf.bins.resize(col.values.size());
  for (std::size_t i = 0; i < col.values.size(); ++i) {
    double v = col.values[i];
    if (is_missing(v)) {
      bf.bins[i] = static_cast<std::uint16_t>(bf.n_bins);
    } else {
      auto it = std::lower_bound(bf.uppers.begin(), bf.uppers.end(), v);
      bf.bins[i] = static_cast<std::uint16_t>(it - bf.uppers.begin());
    }
  }
  return bf;
}

BinnedFeature bin_categorical(const CategoricalColumn& col) {
  BinnedFeature bf;
  bf.categorical = true;
  if (col.dict->size() > 60000) {
    throw ContractError("categorical column '" + col.name + "' has too many categories");
  }
  bf.n_bins = static_cast<int>(col.dict->size());
  bf.bins.resize(col.codes.size());
  for (std::size_t i = 0; i < col.codes.size(); ++i) {
    std::int32_t c = col.codes[i];
    bf.bins[i] = static_cast<std::uint16_t>(c < 0 ? bf.n_bins : c);
  }
  return bf;
}

// ---------------------------------------------------------------------------
// Tree growing
// ---------------------------------------------------------------------------

struct GradPair {
  double g = 0.0;
  double h = 0.0;
  std::uint32_t n = 0;
};

struct SplitCandidate {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  bool categorical = false;
  int threshold_bin = -1;                 // numeric
  std::vector<std::int32_t> left_cats;    // categorical, sorted
  int order_key = -1;                     // tie-break within a feature
  bool missing_left = false;
  double left_g = 0, left_h = 0;
  std::uint32_t left_n = 0;

  bool valid() const { return feature >= 0 && gain > kMinGain; }
};

// Strict deterministic preference: higher gain, then lower feature index, then
// lower threshold key, then missing-right before missing-left.
bool better_candidate(const SplitCandidate& a, const SplitCandidate& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a.feature != b.feature) return a.feature < b.feature;
  if (a.order_key != b.order_key) return a.order_key < b.order_key;
  return !a.missing_left && b.missing_left;
}

using Histogram = std::vector<std::vector<GradPair>>;  // [feature slot][bin]

struct LeafState {
  int node = -1;
  int depth = 0;
  int order = 0;
  std::vector<std::uint32_t> rows;
  double sum_g = 0, sum_h = 0;
  Histogram hist;
  SplitCandidate best;
};

class TreeGrower {
 public:
  TreeGrower(const std::vector<BinnedFeature>& features, const BoostParams& params,
             std::span<const double> grad, std::span<const double> hess)
      : features_(features), p_(params), grad_(grad), hess_(hess) {}

  // Returns an empty optional when not even the root can split.
  std::optional<Tree> grow(const std::vector<std::uint32_t>& bag,
                           const std::vector<int>& tree_features) {
    tree_features_ = &tree_features;
    Tree tree;
    std::vector<std::unique_ptr<LeafState>> leaves;

    auto root = std::make_unique<LeafState>();
    root->node = 0;
    root->rows = bag;
    for (auto r : bag) {
      root->sum_g += grad_[r];
      root->sum_h += hess_[r];
    }
    tree.nodes.emplace_back();
    build_histogram(*root);
    find_best_split(*root);
    leaves.push_back(std::move(root));

    int next_order = 1;
    while (static_cast<int>(leaves.size()) < p_.num_leaves) {
      LeafState* target = nullptr;
      for (auto& leaf : leaves) {
        if (!leaf->best.valid()) continue;
        if (!target) {
          target = leaf.get();
        } else if (better_candidate(leaf->best, target->best)) {
          target = leaf.get();
        } else if (!better_candidate(target->best, leaf->best) &&
                   leaf->order < target->order) {
          target = leaf.get();  // full tie, prefer the older leaf
        }
      }
      if (!target) break;
      apply_split(tree, leaves, *target, next_order);
    }

    if (tree.nodes.size() == 1) return std::nullopt;  // root never split

    for (auto& leaf : leaves) {
      auto& node = tree.nodes[leaf->node];
      node.feature = -1;
      node.leaf_value =
          -leaf->sum_g / (leaf->sum_h + p_.l2_reg) * p_.learning_rate;
    }
    return tree;
  }

 private:
  void build_histogram(LeafState& leaf) {
    const auto& feats = *tree_features_;
    leaf.hist.resize(feats.size());
    for (std::size_t s = 0; s < feats.size(); ++s) {
      const auto& bf = features_[feats[s]];
      auto& h = leaf.hist[s];
      h.assign(bf.n_bins + 1, GradPair{});
      const auto* bins = bf.bins.data();
      for (auto r : leaf.rows) {
        auto& cell = h[bins[r]];
        cell.g += grad_[r];
        cell.h += hess_[r];
        ++cell.n;
      }
    }
  }

  double score(double g, double h) const {
    double denom = h + p_.l2_reg;
    return denom < kMinHessian ? 0.0 : g * g / denom;
  }

  void find_best_split(LeafState& leaf) {
    leaf.best = SplitCandidate{};
    if (leaf.depth >= p_.max_depth) return;
    if (leaf.rows.size() < 2 * static_cast<std::size_t>(p_.min_data_in_leaf)) return;
    const double parent_score = score(leaf.sum_g, leaf.sum_h);
    const auto& feats = *tree_features_;
    for (std::size_t s = 0; s < feats.size(); ++s) {
      const auto& bf = features_[feats[s]];
      if (bf.categorical) {
        eval_categorical(leaf, s, feats[s], parent_score);
      } else {
        eval_numeric(leaf, s, feats[s], parent_score);
      }
    }
  }

  void try_candidate(LeafState& leaf, double parent_score, int feature, bool categorical,
                     int order_key, bool missing_left, double gl, double hl,
                     std::uint32_t nl, int threshold_bin,
                     const std::vector<std::int32_t>* left_cats) {
    const auto n = static_cast<std::uint32_t>(leaf.rows.size());
    const auto min_data = static_cast<std::uint32_t>(p_.min_data_in_leaf);
    if (nl < min_data || n - nl < min_data) return;
    const double gr = leaf.sum_g - gl;
    const double hr = leaf.sum_h - hl;
    if (hl + p_.l2_reg < kMinHessian || hr + p_.l2_reg < kMinHessian) return;
    const double gain = score(gl, hl) + score(gr, hr) - parent_score;
    if (gain <= kMinGain) return;

    SplitCandidate cand;
    cand.gain = gain;
    cand.feature = feature;
    cand.categorical = categorical;
    cand.threshold_bin = threshold_bin;
    cand.order_key = order_key;
    cand.missing_left = missing_left;
    cand.left_g = gl;
    cand.left_h = hl;
    cand.left_n = nl;
    if (left_cats) cand.left_cats = *left_cats;
    if (!leaf.best.valid() || better_candidate(cand, leaf.best)) {
      leaf.best = std::move(cand);
    }
  }

  void eval_numeric(LeafState& leaf, std::size_t slot, int feature, double parent_score) {
    const auto& hist = leaf.hist[slot];
    const auto& bf = features_[feature];
    const auto& miss = hist[bf.missing_bin()];
    // missing routed right
    {
      double gl = 0, hl = 0;
      std::uint32_t nl = 0;
      for (int b = 0; b + 1 < bf.n_bins; ++b) {
        gl += hist[b].g;
        hl += hist[b].h;
        nl += hist[b].n;
        try_candidate(leaf, parent_score, feature, false, b, false, gl, hl, nl, b,
                      nullptr);
      }
    }
    // missing routed left
    if (miss.n > 0) {
      double gl = miss.g, hl = miss.h;
      std::uint32_t nl = miss.n;
      for (int b = 0; b + 1 < bf.n_bins; ++b) {
        gl += hist[b].g;
        hl += hist[b].h;
        nl += hist[b].n;
        try_candidate(leaf, parent_score, feature, false, b, true, gl, hl, nl, b,
                      nullptr);
      }
    }
  }

  void eval_categorical(LeafState& leaf, std::size_t slot, int feature,
                        double parent_score) {
    const auto& hist = leaf.hist[slot];
    const auto& bf = features_[feature];
    const auto& miss = hist[bf.missing_bin()];

    std::vector<std::int32_t> present;
    for (int b = 0; b < bf.n_bins; ++b) {
      if (hist[b].n > 0) present.push_back(b);
    }
    if (present.size() < 2 && !(present.size() == 1 && miss.n > 0)) return;

    auto add = [&](const std::vector<std::int32_t>& cats, int key, bool missing_left) {
      double gl = 0, hl = 0;
      std::uint32_t nl = 0;
      for (auto c : cats) {
        gl += hist[c].g;
        hl += hist[c].h;
        nl += hist[c].n;
      }
      if (missing_left) {
        gl += miss.g;
        hl += miss.h;
        nl += miss.n;
      }
      std::vector<std::int32_t> sorted = cats;
      std::sort(sorted.begin(), sorted.end());
      try_candidate(leaf, parent_score, feature, true, key, missing_left, gl, hl, nl, -1,
                    &sorted);
    };

    if (present.size() <= kMaxOrderedCategories) {
      // Sort categories by gradient/hessian ratio and scan prefixes, the
      // many-vs-many ordered scheme.
      std::vector<std::int32_t> ordered = present;
      std::sort(ordered.begin(), ordered.end(), [&](std::int32_t a, std::int32_t b) {
        double ra = hist[a].g / (hist[a].h + kMinHessian);
        double rb = hist[b].g / (hist[b].h + kMinHessian);
        if (ra != rb) return ra < rb;
        return a < b;
      });
      std::vector<std::int32_t> prefix;
      for (std::size_t p = 1; p <= ordered.size(); ++p) {
        prefix.push_back(ordered[p - 1]);
        const bool last = p == ordered.size();
        if (!last || miss.n > 0) {
          if (!last) add(prefix, static_cast<int>(p), true);
          if (!(last && miss.n == 0)) add(prefix, static_cast<int>(p), false);
        }
      }
    } else {
      // one-vs-rest
      std::vector<std::int32_t> single(1);
      for (auto c : present) {
        single[0] = c;
        add(single, c, false);
        if (miss.n > 0) add(single, c, true);
      }
    }
  }

  void apply_split(Tree& tree, std::vector<std::unique_ptr<LeafState>>& leaves,
                   LeafState& leaf, int& next_order) {
    const auto& cand = leaf.best;
    const auto& bf = features_[cand.feature];

    auto& node = tree.nodes[leaf.node];
    node.feature = cand.feature;
    node.categorical = cand.categorical;
    node.missing_left = cand.missing_left;
    node.gain = cand.gain;
    if (cand.categorical) {
      node.left_categories = cand.left_cats;
    } else {
      node.threshold = bf.uppers[cand.threshold_bin];
    }
    node.left = static_cast<int>(tree.nodes.size());
    node.right = node.left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();

    // Route rows in bin space.
    std::vector<bool> in_left_cat;
    if (cand.categorical) {
      in_left_cat.assign(bf.n_bins, false);
      for (auto c : cand.left_cats) in_left_cat[static_cast<std::size_t>(c)] = true;
    }
    auto goes_left = [&](std::uint32_t r) {
      int b = bf.bins[r];
      if (b == bf.missing_bin()) return cand.missing_left;
      if (cand.categorical) return static_cast<bool>(in_left_cat[b]);
      return b <= cand.threshold_bin;
    };

    auto left = std::make_unique<LeafState>();
    auto right = std::make_unique<LeafState>();
    left->node = node.left;
    right->node = node.right;
    left->depth = right->depth = leaf.depth + 1;
    left->order = next_order++;
    right->order = next_order++;
    for (auto r : leaf.rows) {
      (goes_left(r) ? left->rows : right->rows).push_back(r);
    }
    left->sum_g = cand.left_g;
    left->sum_h = cand.left_h;
    right->sum_g = leaf.sum_g - cand.left_g;
    right->sum_h = leaf.sum_h - cand.left_h;

    // Histogram of the smaller child is built; the sibling is derived by
    // subtraction from the parent.
    LeafState* build = left->rows.size() <= right->rows.size() ? left.get() : right.get();
    LeafState* derive = build == left.get() ? right.get() : left.get();
    build_histogram(*build);
    derive->hist.resize(leaf.hist.size());
    for (std::size_t s = 0; s < leaf.hist.size(); ++s) {
      auto& out = derive->hist[s];
      out.resize(leaf.hist[s].size());
      for (std::size_t b = 0; b < out.size(); ++b) {
        out[b].g = leaf.hist[s][b].g - build->hist[s][b].g;
        out[b].h = leaf.hist[s][b].h - build->hist[s][b].h;
        out[b].n = leaf.hist[s][b].n - build->hist[s][b].n;
      }
    }
    find_best_split(*left);
    find_best_split(*right);

    const int dead_node = leaf.node;
    leaves.erase(std::find_if(leaves.begin(), leaves.end(),
                              [&](const auto& l) { return l->node == dead_node; }));
    leaves.push_back(std::move(left));
    leaves.push_back(std::move(right));
  }

  const std::vector<BinnedFeature>& features_;
  const BoostParams& p_;
  std::span<const double> grad_, hess_;
  const std::vector<int>* tree_features_ = nullptr;
};

// Feature columns of `ds` arranged in the model's feature order.
FeatureMatrixView resolve_features(const TabularDataset& ds,
                                   const std::vector<std::string>& names,
                                   const std::vector<ColumnKind>& kinds) {
  FeatureMatrixView out(ds);
  out.numeric.assign(names.size(), nullptr);
  out.categorical.assign(names.size(), nullptr);
  for (std::size_t f = 0; f < names.size(); ++f) {
    const ColumnSpec* spec = ds.schema.find(names[f]);
    if (!spec || spec->kind != kinds[f]) {
      throw SchemaError("dataset lacks feature '" + names[f] + "' of kind " +
                        to_string(kinds[f]));
    }
    if (kinds[f] == ColumnKind::numeric) {
      out.numeric[f] = &ds.numeric(names[f]);
    } else {
      out.categorical[f] = &ds.categorical(names[f]);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

double Tree::predict_row(const FeatureMatrixView& view, std::size_t row) const {
  int idx = 0;
  while (!nodes[idx].is_leaf()) {
    const auto& node = nodes[idx];
    bool left;
    if (node.categorical) {
      std::int32_t code = view.categorical[node.feature]->codes[row];
      if (code < 0) {
        left = node.missing_left;
      } else {
        left = std::binary_search(node.left_categories.begin(),
                                  node.left_categories.end(), code);
      }
    } else {
      double v = view.numeric[node.feature]->values[row];
      left = is_missing(v) ? node.missing_left : v <= node.threshold;
    }
    idx = left ? node.left : node.right;
  }
  return nodes[idx].leaf_value;
}

int Tree::n_leaves() const {
  int n = 0;
  for (const auto& node : nodes) n += node.is_leaf() ? 1 : 0;
  return n;
}

int Tree::depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_leaf()) {
      depth[nodes[i].left] = depth[i] + 1;
      depth[nodes[i].right] = depth[i] + 1;
    }
    best = std::max(best, depth[i]);
  }
  return best;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

BoostedModel fit(const TabularDataset& train, const TabularDataset* valid,
                 const BoostParams& params, std::span<const double> weights) {
  params.validate();
  if (!train.labels) throw DegenerateLabelError("training data has no labels");
  const std::size_t n = train.n_rows();
  const auto& y = *train.labels;

  if (!weights.empty() && weights.size() != n) {
    throw ContractError("weights length " + std::to_string(weights.size()) +
                        " does not match row count " + std::to_string(n));
  }
  std::vector<double> w(n, 1.0);
  if (!weights.empty()) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] < 0) throw ContractError("negative sample weight");
      w[i] = weights[i];
      total += weights[i];
    }
    if (total <= 0) throw ContractError("sample weights are all zero");
  }

  double w_pos = 0, w_neg = 0;
  for (std::size_t i = 0; i < n; ++i) (y[i] ? w_pos : w_neg) += w[i];
  if (w_pos <= 0 || w_neg <= 0) {
    throw DegenerateLabelError("training labels contain a single class");
  }

  BoostedModel model;
  for (const auto& c : train.schema.columns) {
    model.feature_names.push_back(c.name);
    model.feature_kinds.push_back(c.kind);
  }
  model.learning_rate = params.learning_rate;
  const double base_rate = w_pos / (w_pos + w_neg);
  model.base_score = std::log(base_rate / (1.0 - base_rate));

  FeatureMatrixView train_view(train);
  std::vector<BinnedFeature> binned;
  binned.reserve(train.schema.columns.size());
  for (std::size_t f = 0; f < train.schema.columns.size(); ++f) {
    if (train_view.is_categorical(f)) {
      binned.push_back(bin_categorical(*train_view.categorical[f]));
    } else {
      binned.push_back(bin_numeric(*train_view.numeric[f], params.max_bins));
    }
  }

  // Validation state for early stopping.
  std::optional<FeatureMatrixView> valid_view;
  std::vector<double> valid_scores;
  std::vector<std::int8_t> valid_labels;
  const bool use_early_stop = valid != nullptr && params.early_stopping_rounds > 0;
  if (valid) {
    if (!valid->labels) throw DegenerateLabelError("validation data has no labels");
    valid_view = resolve_features(*valid, model.feature_names, model.feature_kinds);
    valid_labels = *valid->labels;
    bool has_pos = false, has_neg = false;
    for (auto l : valid_labels) (l ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
      throw DegenerateLabelError("validation labels contain a single class");
    }
    valid_scores.assign(valid->n_rows(), model.base_score);
  }

  std::vector<double> scores(n, model.base_score);
  std::vector<double> grad(n), hess(n);

  Rng rng(params.seed);
  std::vector<std::uint32_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = static_cast<std::uint32_t>(i);
  std::vector<std::uint32_t> bag = all_rows;
  const bool bagging = params.subsample < 1.0 && params.subsample_freq > 0;

  std::vector<int> all_features(train.schema.columns.size());
  for (std::size_t f = 0; f < all_features.size(); ++f) all_features[f] = static_cast<int>(f);
  const int tree_feature_count = std::max(
      1, static_cast<int>(std::lround(params.colsample_bytree *
                                      static_cast<double>(all_features.size()))));

  double best_auc = -1.0;
  int best_round = 0;

  for (int round = 0; round < params.num_boost_round; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(scores[i]);
      grad[i] = (p - static_cast<double>(y[i])) * w[i];
      hess[i] = p * (1.0 - p) * w[i];
    }

    if (bagging && round % params.subsample_freq == 0) {
      std::vector<std::uint32_t> shuffled = all_rows;
      rng.shuffle(shuffled);
      auto take = std::max<std::size_t>(
          1, static_cast<std::size_t>(params.subsample * static_cast<double>(n)));
      bag.assign(shuffled.begin(), shuffled.begin() + take);
      std::sort(bag.begin(), bag.end());
    }

    std::vector<int> tree_features = all_features;
    if (tree_feature_count < static_cast<int>(all_features.size())) {
      std::vector<int> shuffled = all_features;
      rng.shuffle(shuffled);
      tree_features.assign(shuffled.begin(), shuffled.begin() + tree_feature_count);
      std::sort(tree_features.begin(), tree_features.end());
    }

    TreeGrower grower(binned, params, grad, hess);
    auto tree = grower.grow(bagging ? bag : all_rows, tree_features);
    if (!tree) break;  // no split clears the gain bar; further rounds are no-ops

    for (std::size_t i = 0; i < n; ++i) scores[i] += tree->predict_row(train_view, i);
    model.trees.push_back(std::move(*tree));

    if (valid) {
      const auto& t = model.trees.back();
      for (std::size_t i = 0; i < valid_scores.size(); ++i) {
        valid_scores[i] += t.predict_row(*valid_view, i);
      }
      if (use_early_stop) {
        double a = auc(valid_labels, valid_scores);
        if (a > best_auc) {
          best_auc = a;
          best_round = static_cast<int>(model.trees.size());
        }
        if (static_cast<int>(model.trees.size()) - best_round >=
            params.early_stopping_rounds) {
          break;
        }
      }
    }
  }

  model.best_iteration =
      use_early_stop && best_round > 0 ? best_round : static_cast<int>(model.trees.size());
  return model;
}

// ---------------------------------------------------------------------------
// prediction / importance
// ---------------------------------------------------------------------------

std::vector<double> BoostedModel::predict_raw(const TabularDataset& ds, int n_trees) const {
  FeatureMatrixView view = resolve_features(ds, feature_names, feature_kinds);
  const int limit = n_trees < 0 ? best_iteration
                                : std::min<int>(n_trees, static_cast<int>(trees.size()));
  std::vector<double> out(ds.n_rows(), base_score);
  for (int t = 0; t < limit; ++t) {
    const auto& tree = trees[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += tree.predict_row(view, i);
  }
  return out;
}

std::vector<double> BoostedModel::predict_score(const TabularDataset& ds) const {
  auto out = predict_raw(ds);
  for (double& v : out) {
    v = std::clamp(sigmoid(v), 1e-15, 1.0 - 1e-15);
  }
  return out;
}

std::vector<double> predict_score(const BoostedModel& model, const TabularDataset& ds) {
  return model.predict_score(ds);
}

std::map<std::string, double> feature_importance(const BoostedModel& model) {
  std::map<std::string, double> gains;
  for (const auto& name : model.feature_names) gains[name] = 0.0;
  for (int t = 0; t < model.best_iteration; ++t) {
    for (const auto& node : model.trees[static_cast<std::size_t>(t)].nodes) {
      if (!node.is_leaf()) {
        gains[model.feature_names[static_cast<std::size_t>(node.feature)]] += node.gain;
      }
    }
  }
  return gains;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string BoostedModel::to_json_string() const {
  json features = json::array();
  for (std::size_t f = 0; f < feature_names.size(); ++f) {
    features.push_back({{"name", feature_names[f]}, {"kind", to_string(feature_kinds[f])}});
  }
  json jtrees = json::array();
  for (const auto& tree : trees) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        nodes.push_back({{"value", node.leaf_value}});
      } else if (node.categorical) {
        nodes.push_back({{"feature", node.feature},
                         {"categories", node.left_categories},
                         {"missing_left", node.missing_left},
                         {"left", node.left},
                         {"right", node.right},
                         {"gain", node.gain}});
      } else {
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"missing_left", node.missing_left},
                         {"left", node.left},
                         {"right", node.right},
                         {"gain", node.gain}});
      }
    }
    jtrees.push_back({{"nodes", nodes}});
  }
  json j{{"format", "driftgate.model.v1"},
         {"base_score", base_score},
         {"best_iteration", best_iteration},
         {"learning_rate", learning_rate},
         {"features", features},
         {"trees", jtrees}};
  return j.dump();
}

BoostedModel BoostedModel::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  if (j.value("format", std::string()) != "driftgate.model.v1") {
    throw ParseError("not a driftgate model document");
  }
  BoostedModel model;
  model.base_score = j.at("base_score").get<double>();
  model.best_iteration = j.at("best_iteration").get<int>();
  model.learning_rate = j.at("learning_rate").get<double>();
  for (const auto& f : j.at("features")) {
    model.feature_names.push_back(f.at("name").get<std::string>());
    model.feature_kinds.push_back(column_kind_from_string(f.at("kind").get<std::string>()));
  }
  for (const auto& jt : j.at("trees")) {
    Tree tree;
    for (const auto& jn : jt.at("nodes")) {
      TreeNode node;
      if (jn.contains("value")) {
        node.leaf_value = jn["value"].get<double>();
      } else {
        node.feature = jn.at("feature").get<int>();
        node.missing_left = jn.at("missing_left").get<bool>();
        node.left = jn.at("left").get<int>();
        node.right = jn.at("right").get<int>();
        node.gain = jn.value("gain", 0.0);
        if (jn.contains("categories")) {
          node.categorical = true;
          node.left_categories = jn["categories"].get<std::vector<std::int32_t>>();
        } else {
          node.threshold = jn.at("threshold").get<double>();
        }
      }
      tree.nodes.push_back(std::move(node));
    }
    model.trees.push_back(std::move(tree));
  }
  if (model.best_iteration > static_cast<int>(model.trees.size())) {
    throw ParseError("best_iteration exceeds tree count");
  }
  return model;
}

void BoostedModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << to_json_string() << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

BoostedModel BoostedModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

}  // namespace driftgate
