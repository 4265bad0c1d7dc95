#include "repo_vitality/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "repo_vitality/error.hpp"
#include "repo_vitality/parallel.hpp"
#include "repo_vitality/rng.hpp"

namespace rv {

namespace {

constexpr int kModelVersion = 1;
constexpr std::string_view kModelFormat = "repo-vitality-forest";

inline std::size_t cls(Label l) { return static_cast<std::size_t>(l); }

// Sum of squared class counts over n, kept as an exact fraction num/den.
struct Fraction {
  __int128 num;
  __int128 den;
};

inline bool greater(const Fraction& a, const Fraction& b) { return a.num * b.den > b.num * a.den; }

inline Fraction split_score(long l0, long l1, long r0, long r1) {
  const long nl = l0 + l1, nr = r0 + r1;
  const __int128 sl = static_cast<__int128>(l0) * l0 + static_cast<__int128>(l1) * l1;
  const __int128 sr = static_cast<__int128>(r0) * r0 + static_cast<__int128>(r1) * r1;
  return {sl * nr + sr * nl, static_cast<__int128>(nl) * nr};
}

class TreeGrower {
 public:
  TreeGrower(const Eigen::MatrixXd& X, std::span<const Label> y, int mtry, int min_leaf, std::optional<int> max_depth,
             std::uint64_t seed)
      : X_(X), y_(y), mtry_(mtry), min_leaf_(min_leaf), max_depth_(max_depth), rng_(seed),
        features_(static_cast<std::size_t>(X.cols())) {}

  DecisionTree grow(std::vector<std::size_t> sample) {
    grow_node(std::move(sample), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature{-1};
    double threshold{0.0};
  };

  int grow_node(std::vector<std::size_t> sample, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::array<int, 2> counts{};
    for (auto i : sample) ++counts[cls(y_[i])];
    tree_.nodes[static_cast<std::size_t>(id)].counts = counts;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool too_small = static_cast<int>(sample.size()) < 2 * min_leaf_;
    const bool too_deep = max_depth_ && depth >= *max_depth_;
    if (pure || too_small || too_deep) return id;

    const Split split = best_split(sample, counts);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : sample) (X_(static_cast<Eigen::Index>(i), split.feature) <= split.threshold ? left : right).push_back(i);
    sample.clear();
    sample.shrink_to_fit();

    const int l = grow_node(std::move(left), depth + 1);
    const int r = grow_node(std::move(right), depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<int> sample_features() {
    const int p = static_cast<int>(features_.size());
    std::iota(features_.begin(), features_.end(), 0);
    for (int k = 0; k < mtry_; ++k) {
      std::uniform_int_distribution<int> pick(k, p - 1);
      std::swap(features_[static_cast<std::size_t>(k)], features_[static_cast<std::size_t>(pick(rng_))]);
    }
    std::vector<int> chosen(features_.begin(), features_.begin() + mtry_);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  Split best_split(const std::vector<std::size_t>& sample, const std::array<int, 2>& counts) {
    const long n = static_cast<long>(sample.size());
    const long c0 = counts[0], c1 = counts[1];
    // A split must beat the parent: children's score > (c0^2 + c1^2) / n.
    Fraction best{static_cast<__int128>(c0) * c0 + static_cast<__int128>(c1) * c1, n};
    Split out;

    std::vector<std::pair<double, Label>> column(sample.size());
    for (int f : sample_features()) {
      for (std::size_t k = 0; k < sample.size(); ++k)
        column[k] = {X_(static_cast<Eigen::Index>(sample[k]), f), y_[sample[k]]};
      std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      long l0 = 0, l1 = 0;
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        (column[k].second == Label::unmaintained ? l0 : l1) += 1;
        if (!(column[k].first < column[k + 1].first)) continue;
        const long nl = l0 + l1;
        if (nl < min_leaf_ || n - nl < min_leaf_) continue;
        const Fraction s = split_score(l0, l1, c0 - l0, c1 - l1);
        if (greater(s, best)) {
          best = s;
          const double lo = column[k].first, hi = column[k + 1].first;
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          out = {f, mid};
        }
      }
    }
    return out;
  }

  const Eigen::MatrixXd& X_;
  std::span<const Label> y_;
  int mtry_;
  int min_leaf_;
  std::optional<int> max_depth_;
  Engine rng_;
  std::vector<int> features_;
  DecisionTree tree_;
};

}  // namespace

const DecisionTree::Node& DecisionTree::leaf_for(RowRef x) const {
  const Node* node = &nodes.front();
  while (!node->is_leaf())
    node = &nodes[static_cast<std::size_t>(x(node->feature) <= node->threshold ? node->left : node->right)];
  return *node;
}

Label DecisionTree::predict(RowRef x) const {
  const auto& leaf = leaf_for(x);
  return leaf.counts[cls(Label::active)] > leaf.counts[cls(Label::unmaintained)] ? Label::active : Label::unmaintained;
}

bool DecisionTree::uses_feature(int feature) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const Node& n) { return n.feature == feature; });
}

DecisionTree grow_tree(const Eigen::MatrixXd& X, std::span<const Label> y, std::span<const std::size_t> sample,
                       int mtry, int min_leaf, std::optional<int> max_depth, std::uint64_t seed) {
  TreeGrower grower(X, y, mtry, min_leaf, max_depth, seed);
  return grower.grow(std::vector<std::size_t>(sample.begin(), sample.end()));
}

ForestModel train(const Eigen::MatrixXd& X, std::span<const Label> y, std::vector<std::string> feature_names,
                  const ForestParams& params, unsigned threads) {
  const auto n = static_cast<std::size_t>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (n == 0 || p == 0) throw Error(ErrorKind::empty_input, "training matrix is empty");
  if (y.size() != n) throw Error(ErrorKind::inconsistent_inputs, std::to_string(n) + " rows but " + std::to_string(y.size()) + " labels");
  if (feature_names.size() != static_cast<std::size_t>(p))
    throw Error(ErrorKind::inconsistent_inputs, "feature name count does not match columns");
  if (n < 2) throw Error(ErrorKind::empty_input, "need at least 2 training rows");
  const auto actives = std::count(y.begin(), y.end(), Label::active);
  if (actives == 0 || static_cast<std::size_t>(actives) == n)
    throw Error(ErrorKind::single_class_input, "training labels contain a single class");
  if (!X.allFinite()) throw Error(ErrorKind::inconsistent_inputs, "training matrix has non-finite values");

  const int mtry = params.mtry.value_or(std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p))))));
  if (params.n_trees < 1) throw Error(ErrorKind::invalid_params, "n_trees must be >= 1");
  if (mtry < 1 || mtry > p) throw Error(ErrorKind::invalid_params, "mtry must be in [1, " + std::to_string(p) + "]");
  if (params.min_leaf < 1) throw Error(ErrorKind::invalid_params, "min_leaf must be >= 1");
  if (params.max_depth && *params.max_depth < 0) throw Error(ErrorKind::invalid_params, "max_depth must be >= 0");

  ForestModel model;
  model.feature_names = std::move(feature_names);
  model.params = params;
  model.params.mtry = mtry;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  model.oob_indices.resize(static_cast<std::size_t>(params.n_trees));

  parallel_for(static_cast<std::size_t>(params.n_trees), threads, [&](std::size_t t) {
    Engine rng(derive_seed(params.seed, {tag(Stream::tree), t, 0}));
    std::vector<std::size_t> sample(n);
    std::vector<bool> drawn(n, false);
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& s : sample) {
        s = pick(rng);
        drawn[s] = true;
      }
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
      drawn.assign(n, true);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!drawn[i]) model.oob_indices[t].push_back(i);
    model.trees[t] = grow_tree(X, y, sample, mtry, params.min_leaf, params.max_depth,
                               derive_seed(params.seed, {tag(Stream::tree), t, 1}));
  });
  return model;
}

int active_votes(const ForestModel& model, RowRef x) {
  int votes = 0;
  for (const auto& tree : model.trees) votes += tree.predict(x) == Label::active;
  return votes;
}

double predict_proba(const ForestModel& model, RowRef x) {
  return static_cast<double>(active_votes(model, x)) / static_cast<double>(model.n_trees());
}

Eigen::RowVectorXd model_row(const ForestModel& model, const DataPointVector& x) {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(model.feature_names.size()));
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    const auto& name = model.feature_names[j];
    auto it = std::find(x.names.begin(), x.names.end(), name);
    if (it == x.names.end()) throw Error(ErrorKind::missing_feature, x.repo_id + ": model needs '" + name + "'");
    row(static_cast<Eigen::Index>(j)) = x.values[static_cast<std::size_t>(it - x.names.begin())];
  }
  return row;
}

double predict_proba(const ForestModel& model, const DataPointVector& x) { return predict_proba(model, model_row(model, x)); }

Label label_for_proba(double p_active) { return p_active >= 0.5 ? Label::active : Label::unmaintained; }

Label predict_label(const ForestModel& model, const DataPointVector& x) { return label_for_proba(predict_proba(model, x)); }

ImportanceTable mda_importance(const ForestModel& model, const Eigen::MatrixXd& X, std::span<const Label> y,
                               int repeats, unsigned threads) {
  if (static_cast<std::size_t>(X.cols()) != model.feature_names.size() || static_cast<std::size_t>(X.rows()) != y.size())
    throw Error(ErrorKind::inconsistent_inputs, "importance data does not match the model layout");
  if (repeats < 1) throw Error(ErrorKind::invalid_params, "repeats must be >= 1");
  std::size_t trees_with_oob = 0;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& oob = model.oob_indices[t];
    if (std::any_of(oob.begin(), oob.end(), [&](std::size_t i) { return i >= y.size(); }))
      throw Error(ErrorKind::inconsistent_inputs, "OOB index outside the supplied data");
    trees_with_oob += !oob.empty();
  }
  if (trees_with_oob == 0) throw Error(ErrorKind::no_oob, "no tree has out-of-bag rows");

  const std::size_t p = model.feature_names.size();
  // drop[f][t] = sum over repeats of (OOB accuracy - permuted OOB accuracy) for tree t.
  std::vector<std::vector<double>> drop(p, std::vector<double>(model.trees.size(), 0.0));
  parallel_for(model.trees.size(), threads, [&](std::size_t t) {
    const auto& tree = model.trees[t];
    const auto& oob = model.oob_indices[t];
    if (oob.empty()) return;
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(oob.size()), X.cols());
    for (std::size_t k = 0; k < oob.size(); ++k) rows.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(oob[k]));
    const auto accuracy = [&](const Eigen::MatrixXd& m) {
      std::size_t hit = 0;
      for (std::size_t k = 0; k < oob.size(); ++k) hit += tree.predict(m.row(static_cast<Eigen::Index>(k))) == y[oob[k]];
      return static_cast<double>(hit) / static_cast<double>(oob.size());
    };
    const double base = accuracy(rows);
    for (std::size_t f = 0; f < p; ++f) {
      if (!tree.uses_feature(static_cast<int>(f))) continue;  // permuting an unused column changes nothing
      const Eigen::VectorXd original = rows.col(static_cast<Eigen::Index>(f));
      std::vector<std::size_t> perm(oob.size());
      for (int r = 0; r < repeats; ++r) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Engine rng(derive_seed(model.params.seed, {tag(Stream::mda), f, t, static_cast<std::uint64_t>(r)}));
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t k = 0; k < oob.size(); ++k) rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f)) = original(static_cast<Eigen::Index>(perm[k]));
        drop[f][t] += base - accuracy(rows);
      }
      rows.col(static_cast<Eigen::Index>(f)) = original;
    }
  });

  ImportanceTable out;
  const double denom = static_cast<double>(trees_with_oob) * repeats;
  for (std::size_t f = 0; f < p; ++f) {
    double sum = 0.0;
    for (double d : drop[f]) sum += d;
    out.push_back({model.feature_names[f], 100.0 * sum / denom});
  }
  return out;
}

std::string serialize_model(const ForestModel& model) {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  auto& pj = j["params"];
  pj["n_trees"] = model.params.n_trees;
  pj["mtry"] = model.params.mtry ? nlohmann::ordered_json(*model.params.mtry) : nlohmann::ordered_json(nullptr);
  pj["min_leaf"] = model.params.min_leaf;
  pj["max_depth"] = model.params.max_depth ? nlohmann::ordered_json(*model.params.max_depth) : nlohmann::ordered_json(nullptr);
  pj["seed"] = model.params.seed;
  pj["bootstrap"] = model.params.bootstrap;
  j["scenario"] = model.scenario ? nlohmann::ordered_json(to_string(*model.scenario)) : nlohmann::ordered_json(nullptr);
  j["class_order"] = {"unmaintained", "active"};
  j["feature_names"] = model.feature_names;
  j["trees"] = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    nlohmann::ordered_json tj;
    tj["oob"] = model.oob_indices[t];
    tj["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : model.trees[t].nodes)
      tj["nodes"].push_back({n.feature, n.threshold, n.left, n.right, n.counts[0], n.counts[1]});
    j["trees"].push_back(std::move(tj));
  }
  return j.dump() + "\n";
}

ForestModel deserialize_model(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kModelFormat) throw Error(ErrorKind::parse_error, "not a forest model file");
    if (j.at("version").get<int>() != kModelVersion)
      throw Error(ErrorKind::parse_error, "unsupported model version " + std::to_string(j.at("version").get<int>()));
    ForestModel m;
    const auto& pj = j.at("params");
    m.params.n_trees = pj.at("n_trees").get<int>();
    if (!pj.at("mtry").is_null()) m.params.mtry = pj.at("mtry").get<int>();
    m.params.min_leaf = pj.at("min_leaf").get<int>();
    if (!pj.at("max_depth").is_null()) m.params.max_depth = pj.at("max_depth").get<int>();
    m.params.seed = pj.at("seed").get<std::uint64_t>();
    m.params.bootstrap = pj.at("bootstrap").get<bool>();
    if (!j.at("scenario").is_null()) m.scenario = parse_scenario(j.at("scenario").get<std::string>());
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const int p = static_cast<int>(m.feature_names.size());
    for (const auto& tj : j.at("trees")) {
      m.oob_indices.push_back(tj.at("oob").get<std::vector<std::size_t>>());
      DecisionTree tree;
      for (const auto& nj : tj.at("nodes")) {
        DecisionTree::Node n;
        n.feature = nj.at(0).get<int>();
        n.threshold = nj.at(1).get<double>();
        n.left = nj.at(2).get<int>();
        n.right = nj.at(3).get<int>();
        n.counts = {nj.at(4).get<int>(), nj.at(5).get<int>()};
        tree.nodes.push_back(n);
      }
      const int size = static_cast<int>(tree.nodes.size());
      if (size == 0) throw Error(ErrorKind::parse_error, "tree without nodes");
      for (const auto& n : tree.nodes)
        if (!n.is_leaf() && (n.feature >= p || n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size))
          throw Error(ErrorKind::parse_error, "tree node references out of range");
      m.trees.push_back(std::move(tree));
    }
    if (m.n_trees() != m.params.n_trees) throw Error(ErrorKind::parse_error, "tree count does not match params");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("model file: ") + e.what());
  }
}

void save_model(const ForestModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_failure, "cannot write " + path.string());
  out << serialize_model(model);
}

ForestModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace rv
