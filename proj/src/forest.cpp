#include "precipuq/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "precipuq/parallel.hpp"
#include "precipuq/rng.hpp"

namespace precipuq {

namespace {

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;  // values <= threshold go left
  double gain = 0.0;
};

// Grows one tree over a bag held in `indices`, partitioned in place.
class TreeGrower {
 public:
  TreeGrower(const Matrix& x, std::span<const double> y, const ForestConfig& cfg,
             std::uint64_t seed)
      : x_(x), y_(y), cfg_(cfg), rng_(seed) {
    const std::size_t n = y.size();
    indices_.resize(n);
    if (cfg.bootstrap) {
      for (auto& idx : indices_) idx = static_cast<std::uint32_t>(rng_.below(n));
    } else {
      std::iota(indices_.begin(), indices_.end(), 0u);
    }
    feature_pool_.resize(x.cols());
    sort_buf_.reserve(n);
    part_buf_.reserve(n);
  }

  RegressionTree grow() {
    RegressionTree tree;
    // Stack of (range, node slot); children are filled as ranges pop.
    struct Pending {
      std::size_t begin, end;
      std::size_t node;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, indices_.size(), 0}};

    while (!stack.empty()) {
      const auto [begin, end, node] = stack.back();
      stack.pop_back();
      const std::size_t size = end - begin;

      SplitChoice split;
      if (size >= 2 * static_cast<std::size_t>(cfg_.min_leaf)) {
        split = best_split(begin, end);
      }
      if (!split.found) {
        make_leaf(tree, node, begin, end);
        continue;
      }

      const std::size_t mid = partition(begin, end, split.feature, split.threshold);
      auto& parent = tree.nodes[node];
      parent.feature = static_cast<std::int32_t>(split.feature);
      parent.threshold = split.threshold;
      parent.left = static_cast<std::int32_t>(tree.nodes.size());
      parent.right = static_cast<std::int32_t>(tree.nodes.size() + 1);
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      const auto& self = tree.nodes[node];  // re-read after potential realloc
      stack.push_back({mid, end, static_cast<std::size_t>(self.right)});
      stack.push_back({begin, mid, static_cast<std::size_t>(self.left)});
    }

    tree.members = indices_;
    return tree;
  }

 private:
  void make_leaf(RegressionTree& tree, std::size_t node, std::size_t begin, std::size_t end) {
    auto& leaf = tree.nodes[node];
    leaf.feature = -1;
    leaf.members_begin = static_cast<std::int64_t>(begin);
    leaf.members_end = static_cast<std::int64_t>(end);
  }

  // CART variance-reduction split over mtry random features. Equivalent to
  // maximizing sum_L^2/n_L + sum_R^2/n_R; both children must keep min_leaf
  // bag entries.
  SplitChoice best_split(std::size_t begin, std::size_t end) {
    const std::size_t size = end - begin;
    std::iota(feature_pool_.begin(), feature_pool_.end(), std::size_t{0});
    const std::size_t mtry = std::min<std::size_t>(cfg_.mtry, feature_pool_.size());

    SplitChoice best;
    for (std::size_t k = 0; k < mtry; ++k) {
      const std::size_t pick = k + rng_.below(feature_pool_.size() - k);
      std::swap(feature_pool_[k], feature_pool_[pick]);
      const std::size_t f = feature_pool_[k];

      sort_buf_.assign(indices_.begin() + static_cast<std::ptrdiff_t>(begin),
                       indices_.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(sort_buf_.begin(), sort_buf_.end(), [&](std::uint32_t a, std::uint32_t b) {
        return x_(a, f) < x_(b, f);
      });

      double total = 0.0;
      for (std::uint32_t idx : sort_buf_) total += y_[idx];

      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < size; ++i) {
        left_sum += y_[sort_buf_[i]];
        const std::size_t n_left = i + 1;
        const std::size_t n_right = size - n_left;
        if (n_left < static_cast<std::size_t>(cfg_.min_leaf)) continue;
        if (n_right < static_cast<std::size_t>(cfg_.min_leaf)) break;
        const double v = x_(sort_buf_[i], f);
        const double v_next = x_(sort_buf_[i + 1], f);
        if (!(v_next > v)) continue;  // split only between distinct values

        const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                            (total - left_sum) * (total - left_sum) / static_cast<double>(n_right);
        if (!best.found || gain > best.gain) {
          best.found = true;
          best.feature = f;
          best.threshold = v;  // route x <= v left; robust to midpoint rounding
          best.gain = gain;
        }
      }
    }
    return best;
  }

  // Stable two-way partition of [begin, end) by x <= threshold.
  std::size_t partition(std::size_t begin, std::size_t end, std::size_t feature,
                        double threshold) {
    part_buf_.clear();
    std::size_t write = begin;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t idx = indices_[i];
      if (x_(idx, feature) <= threshold) {
        indices_[write++] = idx;
      } else {
        part_buf_.push_back(idx);
      }
    }
    std::copy(part_buf_.begin(), part_buf_.end(),
              indices_.begin() + static_cast<std::ptrdiff_t>(write));
    return write;
  }

  const Matrix& x_;
  std::span<const double> y_;
  const ForestConfig& cfg_;
  Rng rng_;
  std::vector<std::uint32_t> indices_;
  std::vector<std::size_t> feature_pool_;
  std::vector<std::uint32_t> sort_buf_;
  std::vector<std::uint32_t> part_buf_;
};

}  // namespace

std::size_t RegressionTree::leaf_index(std::span<const double> features) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const auto& nd = nodes[node];
    node = features[static_cast<std::size_t>(nd.feature)] <= nd.threshold
               ? static_cast<std::size_t>(nd.left)
               : static_cast<std::size_t>(nd.right);
  }
  return node;
}

QuantileForest fit_qrf(const Matrix& x, std::span<const double> y, const ForestConfig& cfg) {
  if (y.empty() || x.rows() != y.size()) throw std::invalid_argument("fit_qrf: empty data");
  if (cfg.n_trees < 1) throw std::invalid_argument("fit_qrf: need at least one tree");
  if (y.size() < static_cast<std::size_t>(cfg.min_leaf)) {
    throw std::invalid_argument("fit_qrf: fewer samples than min_leaf");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_qrf: non-finite feature");
  }

  std::vector<RegressionTree> trees(static_cast<std::size_t>(cfg.n_trees));
  parallel_for(trees.size(), cfg.jobs, [&](std::size_t t) {
    const std::uint64_t tree_seed = derive_seed(cfg.seed, t);
    TreeGrower grower(x, y, cfg, tree_seed);
    trees[t] = grower.grow();
    trees[t].seed = tree_seed;
  });

  return QuantileForest(cfg, std::move(trees), std::vector<double>(y.begin(), y.end()));
}

std::vector<double> qrf_weights(const QuantileForest& forest, std::span<const double> features) {
  const std::size_t n = forest.train_targets().size();
  std::vector<double> w(n, 0.0);
  const double tree_factor = 1.0 / static_cast<double>(forest.trees().size());
  for (const auto& tree : forest.trees()) {
    const auto& leaf = tree.nodes[tree.leaf_index(features)];
    const auto begin = static_cast<std::size_t>(leaf.members_begin);
    const auto end = static_cast<std::size_t>(leaf.members_end);
    const double contrib = tree_factor / static_cast<double>(end - begin);
    for (std::size_t k = begin; k < end; ++k) w[tree.members[k]] += contrib;
  }
  return w;
}

QrfPredictor::QrfPredictor(const QuantileForest& forest) : forest_(&forest) {
  const auto& y = forest.train_targets();
  order_.resize(y.size());
  std::iota(order_.begin(), order_.end(), 0u);
  std::sort(order_.begin(), order_.end(),
            [&](std::uint32_t a, std::uint32_t b) { return y[a] < y[b]; });
  weights_.assign(y.size(), 0.0);
}

std::vector<double> QrfPredictor::predict(std::span<const double> features,
                                          const LevelGrid& grid) {
  const auto& y = forest_->train_targets();
  std::fill(weights_.begin(), weights_.end(), 0.0);
  const double tree_factor = 1.0 / static_cast<double>(forest_->trees().size());
  for (const auto& tree : forest_->trees()) {
    const auto& leaf = tree.nodes[tree.leaf_index(features)];
    const auto begin = static_cast<std::size_t>(leaf.members_begin);
    const auto end = static_cast<std::size_t>(leaf.members_end);
    const double contrib = tree_factor / static_cast<double>(end - begin);
    for (std::size_t k = begin; k < end; ++k) weights_[tree.members[k]] += contrib;
  }

  double total = 0.0;
  for (double w : weights_) total += w;

  // Single ascending sweep serves all levels: levels are increasing, so the
  // crossing atoms appear in order.
  std::vector<double> out(grid.size());
  double cum = 0.0;
  std::size_t pos = 0;
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double threshold = grid[l] * total - 1e-12 * total;
    while (pos < order_.size() && cum < threshold) cum += weights_[order_[pos++]];
    out[l] = y[order_[pos > 0 ? pos - 1 : 0]];
  }
  return out;
}

std::vector<double> predict_qrf(const QuantileForest& forest, std::span<const double> features,
                                const LevelGrid& grid) {
  QrfPredictor predictor(forest);
  return predictor.predict(features, grid);
}

namespace {

constexpr char kForestMagic[4] = {'P', 'Q', 'F', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  static_assert(std::is_arithmetic_v<T>);
  write_raw(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_vec(std::istream& in, std::vector<T>& v) {
  static_assert(std::is_arithmetic_v<T>);
  std::uint64_t n = 0;
  read_raw(in, n);
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

// Nodes are written field by field; dumping the struct would leak padding.
void write_nodes(std::ostream& out, const std::vector<TreeNode>& nodes) {
  write_raw(out, static_cast<std::uint64_t>(nodes.size()));
  for (const auto& nd : nodes) {
    write_raw(out, nd.feature);
    write_raw(out, nd.threshold);
    write_raw(out, nd.left);
    write_raw(out, nd.right);
    write_raw(out, nd.members_begin);
    write_raw(out, nd.members_end);
  }
}

void read_nodes(std::istream& in, std::vector<TreeNode>& nodes) {
  std::uint64_t n = 0;
  read_raw(in, n);
  nodes.resize(n);
  for (auto& nd : nodes) {
    read_raw(in, nd.feature);
    read_raw(in, nd.threshold);
    read_raw(in, nd.left);
    read_raw(in, nd.right);
    read_raw(in, nd.members_begin);
    read_raw(in, nd.members_end);
  }
}

}  // namespace

void QuantileForest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.write(kForestMagic, sizeof(kForestMagic));

  nlohmann::ordered_json header;
  header["version"] = 1;
  header["kind"] = "quantile_forest";
  header["n_trees"] = config_.n_trees;
  header["mtry"] = config_.mtry;
  header["min_leaf"] = config_.min_leaf;
  header["bootstrap"] = config_.bootstrap;
  header["seed"] = config_.seed;
  header["n_train"] = train_targets_.size();
  const std::string htext = header.dump();
  write_raw(out, static_cast<std::uint64_t>(htext.size()));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));

  write_vec(out, train_targets_);
  write_raw(out, static_cast<std::uint64_t>(trees_.size()));
  for (const auto& tree : trees_) {
    write_raw(out, tree.seed);
    write_nodes(out, tree.nodes);
    write_vec(out, tree.members);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

QuantileForest QuantileForest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kForestMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a forest container: " + path.string());
  }
  std::uint64_t hlen = 0;
  read_raw(in, hlen);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  const auto header = nlohmann::ordered_json::parse(htext);
  if (header.at("version").get<int>() != 1) {
    throw std::runtime_error("unsupported forest container version");
  }

  QuantileForest forest;
  forest.config_.n_trees = header.at("n_trees").get<int>();
  forest.config_.mtry = header.at("mtry").get<int>();
  forest.config_.min_leaf = header.at("min_leaf").get<int>();
  forest.config_.bootstrap = header.at("bootstrap").get<bool>();
  forest.config_.seed = header.at("seed").get<std::uint64_t>();

  read_vec(in, forest.train_targets_);
  std::uint64_t n_trees = 0;
  read_raw(in, n_trees);
  forest.trees_.resize(n_trees);
  for (auto& tree : forest.trees_) {
    read_raw(in, tree.seed);
    read_nodes(in, tree.nodes);
    read_vec(in, tree.members);
  }
  if (!in) throw std::runtime_error("truncated forest container: " + path.string());
  return forest;
}

}  // namespace precipuq
