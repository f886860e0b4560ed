#include "precipuq/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <json.hpp>

#include "precipuq/rng.hpp"
#include "precipuq/scoring.hpp"

namespace precipuq {

BoostConfig BoostConfig::levelwise_defaults(double alpha) {
  BoostConfig cfg;
  cfg.mode = GrowthMode::levelwise;
  cfg.alpha = alpha;
  cfg.n_iterations = 500;
  cfg.learning_rate = 0.1;
  cfg.max_depth = 3;
  cfg.max_leaves = 1 << 20;
  cfg.min_data_in_leaf = 10;
  cfg.feature_fraction = 1.0;
  cfg.bagging_fraction = 1.0;
  cfg.min_split_gain = 0.0;
  return cfg;
}

BoostConfig BoostConfig::leafwise_defaults(double alpha) {
  BoostConfig cfg;
  cfg.mode = GrowthMode::leafwise;
  cfg.alpha = alpha;
  cfg.n_iterations = 400;
  cfg.learning_rate = 0.05;
  cfg.max_depth = 10;
  cfg.max_leaves = 500;
  cfg.min_data_in_leaf = 200;
  cfg.feature_fraction = 0.75;
  cfg.bagging_fraction = 0.75;
  cfg.min_split_gain = 0.0;
  cfg.max_bins = 255;
  return cfg;
}

void BoostConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("BoostConfig: alpha outside (0, 1)");
  if (n_iterations < 0) throw std::invalid_argument("BoostConfig: negative n_iterations");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("BoostConfig: learning_rate must be positive");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0) ||
      !(bagging_fraction > 0.0 && bagging_fraction <= 1.0)) {
    throw std::invalid_argument("BoostConfig: fractions must lie in (0, 1]");
  }
  if (max_bins < 2 || max_bins > 255) throw std::invalid_argument("BoostConfig: max_bins outside 2..255");
  if (min_data_in_leaf < 1) throw std::invalid_argument("BoostConfig: min_data_in_leaf must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("BoostConfig: max_depth must be >= 1");
  if (max_leaves < 2) throw std::invalid_argument("BoostConfig: max_leaves must be >= 2");
  if (min_split_gain < 0.0) throw std::invalid_argument("BoostConfig: negative min_split_gain");
}

FeatureBinning FeatureBinning::build(const Matrix& x, int max_bins) {
  FeatureBinning binning;
  binning.edges.resize(x.cols());
  const std::size_t n = x.rows();
  std::vector<double> col(n);
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t i = 0; i < n; ++i) col[i] = x(i, f);
    std::sort(col.begin(), col.end());

    auto& edges = binning.edges[f];
    std::vector<double> distinct;
    distinct.reserve(col.size());
    for (double v : col) {
      if (distinct.empty() || v > distinct.back()) distinct.push_back(v);
    }
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      // One bin per distinct value; the lower value is the edge.
      edges.assign(distinct.begin(), distinct.end() - 1);
    } else {
      // Edges at training quantile positions, deduplicated.
      for (int b = 1; b < max_bins; ++b) {
        const std::size_t pos = static_cast<std::size_t>(
            static_cast<double>(b) * static_cast<double>(n) / static_cast<double>(max_bins));
        const double v = col[std::min(pos, n - 1)];
        if ((edges.empty() || v > edges.back()) && v < distinct.back()) edges.push_back(v);
      }
    }
  }
  return binning;
}

int FeatureBinning::bin(std::size_t feature, double value) const {
  // Bin index = number of edges strictly below the value, so bin b covers
  // (edges[b-1], edges[b]].
  const auto& e = edges[feature];
  return static_cast<int>(std::lower_bound(e.begin(), e.end(), value) - e.begin());
}

namespace {

struct LeafRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  int node = -1;
  int depth = 0;

  std::size_t size() const { return end - begin; }
};

struct Candidate {
  double gain = -1.0;
  std::size_t feature = 0;
  int split_bin = -1;       // leafwise
  double threshold = 0.0;   // levelwise
  bool found = false;
};

// Shared grower state for one boosting iteration. Levelwise growth finds
// exact splits by sweeping fit-level presorted feature orders once per depth
// level; leafwise growth builds per-leaf histograms on the binned features.
class BoostTreeGrower {
 public:
  BoostTreeGrower(const BoostConfig& cfg, const Matrix& x,
                  const std::vector<std::uint8_t>& binned, const FeatureBinning& binning,
                  const std::vector<std::vector<std::uint32_t>>& presorted,
                  std::span<const double> gradients, std::vector<std::uint32_t> rows,
                  std::span<const std::size_t> features)
      : cfg_(cfg),
        x_(x),
        binned_(binned),
        binning_(binning),
        presorted_(presorted),
        gradients_(gradients),
        rows_(std::move(rows)),
        features_(features) {}

  BoostTree grow() {
    BoostTree tree;
    tree.nodes.emplace_back();
    LeafRange root{0, rows_.size(), 0, 0};
    if (cfg_.mode == GrowthMode::leafwise) {
      grow_leafwise(tree, root);
    } else {
      grow_levelwise(tree, root);
    }
    return tree;
  }

  const std::vector<std::uint32_t>& rows() const { return rows_; }

  // Leaf ranges in final position, for renewal.
  const std::vector<LeafRange>& leaves() const { return leaves_; }

 private:
  bool splittable(const LeafRange& leaf) const {
    return leaf.depth < cfg_.max_depth &&
           leaf.size() >= 2 * static_cast<std::size_t>(cfg_.min_data_in_leaf);
  }

  Candidate best_split_binned(const LeafRange& leaf) const {
    const std::size_t p = x_.cols();
    Candidate best;
    std::vector<double> hist_g;
    std::vector<std::uint32_t> hist_n;
    double total_g = 0.0;
    for (std::size_t k = leaf.begin; k < leaf.end; ++k) total_g += gradients_[rows_[k]];
    const auto n_leaf = static_cast<double>(leaf.size());

    for (std::size_t f : features_) {
      const std::size_t bins = binning_.n_bins(f);
      if (bins < 2) continue;
      hist_g.assign(bins, 0.0);
      hist_n.assign(bins, 0);
      for (std::size_t k = leaf.begin; k < leaf.end; ++k) {
        const std::uint32_t row = rows_[k];
        const std::uint8_t b = binned_[row * p + f];
        hist_g[b] += gradients_[row];
        ++hist_n[b];
      }
      double left_g = 0.0;
      std::size_t left_n = 0;
      for (std::size_t b = 0; b + 1 < bins; ++b) {
        left_g += hist_g[b];
        left_n += hist_n[b];
        if (hist_n[b] == 0) continue;  // same partition as the previous bin
        const std::size_t right_n = leaf.size() - left_n;
        if (left_n < static_cast<std::size_t>(cfg_.min_data_in_leaf)) continue;
        if (right_n < static_cast<std::size_t>(cfg_.min_data_in_leaf)) break;
        const double right_g = total_g - left_g;
        const double gain = left_g * left_g / static_cast<double>(left_n) +
                            right_g * right_g / static_cast<double>(right_n) -
                            total_g * total_g / n_leaf;
        if (!best.found || gain > best.gain) {
          best.found = true;
          best.gain = gain;
          best.feature = f;
          best.split_bin = static_cast<int>(b);
        }
      }
    }
    return best;
  }

  // Exact best splits for a whole frontier of leaves at once: one pass over
  // each feature's presorted order, with per-leaf running prefix state.
  // Boundary evaluation happens only between distinct feature values, in
  // ascending order, so ties resolve to the earliest boundary and the first
  // feature in `features_`.
  std::vector<Candidate> best_splits_exact(const std::vector<LeafRange>& frontier,
                                           std::span<const std::int32_t> leaf_of_row) const {
    struct SweepState {
      double left_g = 0.0;
      std::size_t left_n = 0;
      double prev_value = 0.0;
    };
    const std::size_t k = frontier.size();
    std::vector<Candidate> best(k);
    std::vector<double> total_g(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = frontier[c].begin; i < frontier[c].end; ++i) {
        total_g[c] += gradients_[rows_[i]];
      }
    }

    std::vector<SweepState> state(k);
    for (std::size_t f : features_) {
      std::fill(state.begin(), state.end(), SweepState{});
      for (std::uint32_t row : presorted_[f]) {
        const std::int32_t c = leaf_of_row[row];
        if (c < 0) continue;
        auto& st = state[static_cast<std::size_t>(c)];
        const double v = x_(row, f);
        if (st.left_n > 0 && v > st.prev_value) {
          const std::size_t size = frontier[static_cast<std::size_t>(c)].size();
          const std::size_t right_n = size - st.left_n;
          if (st.left_n >= static_cast<std::size_t>(cfg_.min_data_in_leaf) &&
              right_n >= static_cast<std::size_t>(cfg_.min_data_in_leaf)) {
            const double right_g = total_g[static_cast<std::size_t>(c)] - st.left_g;
            const double gain =
                st.left_g * st.left_g / static_cast<double>(st.left_n) +
                right_g * right_g / static_cast<double>(right_n) -
                total_g[static_cast<std::size_t>(c)] * total_g[static_cast<std::size_t>(c)] /
                    static_cast<double>(size);
            auto& b = best[static_cast<std::size_t>(c)];
            if (!b.found || gain > b.gain) {
              b.found = true;
              b.gain = gain;
              b.feature = f;
              b.threshold = st.prev_value;
            }
          }
        }
        st.left_g += gradients_[row];
        st.left_n += 1;
        st.prev_value = v;
      }
    }
    return best;
  }

  // Stable partition of the leaf's rows by the split predicate.
  std::size_t apply_split(const LeafRange& leaf, const Candidate& split) {
    scratch_.clear();
    const std::size_t p = x_.cols();
    std::size_t write = leaf.begin;
    for (std::size_t k = leaf.begin; k < leaf.end; ++k) {
      const std::uint32_t row = rows_[k];
      const bool go_left = cfg_.mode == GrowthMode::leafwise
                               ? binned_[row * p + split.feature] <=
                                     static_cast<std::uint8_t>(split.split_bin)
                               : x_(row, split.feature) <= split.threshold;
      if (go_left) {
        rows_[write++] = row;
      } else {
        scratch_.push_back(row);
      }
    }
    std::copy(scratch_.begin(), scratch_.end(),
              rows_.begin() + static_cast<std::ptrdiff_t>(write));
    return write;
  }

  std::pair<LeafRange, LeafRange> split_node(BoostTree& tree, const LeafRange& leaf,
                                             const Candidate& split) {
    const std::size_t mid = apply_split(leaf, split);
    auto& node = tree.nodes[static_cast<std::size_t>(leaf.node)];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.split_bin = split.split_bin;
    node.threshold = split.threshold;
    node.gain = split.gain;
    node.left = static_cast<std::int32_t>(tree.nodes.size());
    node.right = static_cast<std::int32_t>(tree.nodes.size() + 1);
    const int left_id = node.left;
    const int right_id = node.right;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    return {LeafRange{leaf.begin, mid, left_id, leaf.depth + 1},
            LeafRange{mid, leaf.end, right_id, leaf.depth + 1}};
  }

  void grow_leafwise(BoostTree& tree, const LeafRange& root) {
    struct Entry {
      Candidate split;
      LeafRange leaf;
      std::size_t seq = 0;
    };
    auto worse = [](const Entry& a, const Entry& b) {
      if (a.split.gain != b.split.gain) return a.split.gain < b.split.gain;
      return a.seq > b.seq;  // earlier leaves win ties
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    std::size_t seq = 0;

    auto consider = [&](const LeafRange& leaf) {
      if (!splittable(leaf)) {
        leaves_.push_back(leaf);
        return;
      }
      Candidate split = best_split_binned(leaf);
      if (!split.found || !(split.gain > cfg_.min_split_gain)) {
        leaves_.push_back(leaf);
        return;
      }
      heap.push({split, leaf, seq++});
    };

    consider(root);
    std::size_t n_leaves = 1;
    while (!heap.empty() && n_leaves < static_cast<std::size_t>(cfg_.max_leaves)) {
      const Entry e = heap.top();
      heap.pop();
      const auto [left, right] = split_node(tree, e.leaf, e.split);
      ++n_leaves;
      consider(left);
      consider(right);
    }
    // Whatever is still queued stays a leaf.
    while (!heap.empty()) {
      leaves_.push_back(heap.top().leaf);
      heap.pop();
    }
  }

  void grow_levelwise(BoostTree& tree, const LeafRange& root) {
    std::vector<LeafRange> frontier;
    if (splittable(root)) {
      frontier.push_back(root);
    } else {
      leaves_.push_back(root);
      return;
    }
    std::vector<std::int32_t> leaf_of_row(x_.rows(), -1);

    while (!frontier.empty()) {
      std::fill(leaf_of_row.begin(), leaf_of_row.end(), -1);
      for (std::size_t c = 0; c < frontier.size(); ++c) {
        for (std::size_t i = frontier[c].begin; i < frontier[c].end; ++i) {
          leaf_of_row[rows_[i]] = static_cast<std::int32_t>(c);
        }
      }
      const auto splits = best_splits_exact(frontier, leaf_of_row);

      std::vector<LeafRange> next;
      for (std::size_t c = 0; c < frontier.size(); ++c) {
        if (!splits[c].found || !(splits[c].gain > cfg_.min_split_gain)) {
          leaves_.push_back(frontier[c]);
          continue;
        }
        const auto [left, right] = split_node(tree, frontier[c], splits[c]);
        for (const auto& child : {left, right}) {
          if (splittable(child)) {
            next.push_back(child);
          } else {
            leaves_.push_back(child);
          }
        }
      }
      frontier = std::move(next);
    }
  }

  const BoostConfig& cfg_;
  const Matrix& x_;
  const std::vector<std::uint8_t>& binned_;
  const FeatureBinning& binning_;
  const std::vector<std::vector<std::uint32_t>>& presorted_;
  std::span<const double> gradients_;
  std::vector<std::uint32_t> rows_;
  std::span<const std::size_t> features_;
  std::vector<LeafRange> leaves_;
  std::vector<std::uint32_t> scratch_;
};

int route_to_leaf(const BoostEnsemble& ensemble, const BoostTree& tree,
                  std::span<const double> features) {
  int node = 0;
  while (!tree.nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
    const auto f = static_cast<std::size_t>(nd.feature);
    const bool go_left = ensemble.config.mode == GrowthMode::leafwise
                             ? ensemble.binning.bin(f, features[f]) <= nd.split_bin
                             : features[f] <= nd.threshold;
    node = go_left ? nd.left : nd.right;
  }
  return node;
}

}  // namespace

BoostEnsemble fit_boost(const Matrix& x, std::span<const double> y, const BoostConfig& cfg) {
  cfg.validate();
  const std::size_t n = y.size();
  const std::size_t p = x.cols();
  if (n == 0 || x.rows() != n) throw std::invalid_argument("fit_boost: empty data");
  if (static_cast<std::size_t>(cfg.min_data_in_leaf) > n) {
    throw std::invalid_argument("fit_boost: min_data_in_leaf exceeds sample count");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_boost: non-finite feature");
  }

  BoostEnsemble ensemble;
  ensemble.config = cfg;
  ensemble.total_gain.assign(p, 0.0);
  ensemble.base_prediction = empirical_quantile(y, cfg.alpha);

  std::vector<std::uint8_t> binned;
  std::vector<std::vector<std::uint32_t>> presorted;
  if (cfg.mode == GrowthMode::leafwise) {
    ensemble.binning = FeatureBinning::build(x, cfg.max_bins);
    binned.resize(n * p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < p; ++f) {
        binned[i * p + f] = static_cast<std::uint8_t>(ensemble.binning.bin(f, x(i, f)));
      }
    }
  } else {
    presorted.resize(p);
    for (std::size_t f = 0; f < p; ++f) {
      presorted[f].resize(n);
      std::iota(presorted[f].begin(), presorted[f].end(), 0u);
      std::stable_sort(presorted[f].begin(), presorted[f].end(),
                       [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    }
  }

  std::vector<double> scores(n, ensemble.base_prediction);
  std::vector<double> gradients(n, 0.0);
  std::vector<std::uint32_t> row_pool(n);
  std::vector<std::size_t> feature_pool(p);
  std::vector<double> residuals;

  const auto bag_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.bagging_fraction * static_cast<double>(n)));
  const auto feat_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.feature_fraction * static_cast<double>(p)));

  for (int iter = 0; iter < cfg.n_iterations; ++iter) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(iter) + 1));

    // Row subsample without replacement, then sorted so histogram
    // accumulation order is canonical.
    std::iota(row_pool.begin(), row_pool.end(), 0u);
    std::vector<std::uint32_t> rows;
    if (bag_size < n) {
      for (std::size_t k = 0; k < bag_size; ++k) {
        const std::size_t pick = k + rng.below(n - k);
        std::swap(row_pool[k], row_pool[pick]);
      }
      rows.assign(row_pool.begin(), row_pool.begin() + static_cast<std::ptrdiff_t>(bag_size));
      std::sort(rows.begin(), rows.end());
    } else {
      rows = row_pool;
    }

    std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
    std::vector<std::size_t> features;
    if (feat_count < p) {
      for (std::size_t k = 0; k < feat_count; ++k) {
        const std::size_t pick = k + rng.below(p - k);
        std::swap(feature_pool[k], feature_pool[pick]);
      }
      features.assign(feature_pool.begin(),
                      feature_pool.begin() + static_cast<std::ptrdiff_t>(feat_count));
      std::sort(features.begin(), features.end());
    } else {
      features = feature_pool;
    }

    for (std::uint32_t row : rows) {
      gradients[row] = cfg.alpha - (y[row] < scores[row] ? 1.0 : 0.0);
    }

    BoostTreeGrower grower(cfg, x, binned, ensemble.binning, presorted, gradients,
                           std::move(rows), features);
    BoostTree tree = grower.grow();

    // Leaf renewal: each leaf output becomes the empirical alpha-quantile of
    // its in-leaf residuals.
    for (const auto& leaf : grower.leaves()) {
      residuals.clear();
      for (std::size_t k = leaf.begin; k < leaf.end; ++k) {
        const std::uint32_t row = grower.rows()[k];
        residuals.push_back(y[row] - scores[row]);
      }
      tree.nodes[static_cast<std::size_t>(leaf.node)].value =
          empirical_quantile(residuals, cfg.alpha);
    }

    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) ensemble.total_gain[static_cast<std::size_t>(node.feature)] += node.gain;
    }

    ensemble.trees.push_back(std::move(tree));
    const BoostTree& grown = ensemble.trees.back();
    for (std::size_t i = 0; i < n; ++i) {
      const int leaf = route_to_leaf(ensemble, grown, x.row(i));
      scores[i] += cfg.learning_rate * grown.nodes[static_cast<std::size_t>(leaf)].value;
    }

    ensemble.training_curve.push_back(mean_quantile_score(scores, y, cfg.alpha));
  }

  return ensemble;
}

double predict_boost(const BoostEnsemble& ensemble, std::span<const double> features) {
  const std::size_t p = ensemble.total_gain.size();
  if (features.size() != p) throw std::invalid_argument("predict_boost: feature length mismatch");
  double pred = ensemble.base_prediction;
  for (const auto& tree : ensemble.trees) {
    const int leaf = route_to_leaf(ensemble, tree, features);
    pred += ensemble.config.learning_rate * tree.nodes[static_cast<std::size_t>(leaf)].value;
  }
  return pred;
}

namespace {

constexpr char kBoostMagic[4] = {'P', 'Q', 'B', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void BoostEnsemble::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.write(kBoostMagic, sizeof(kBoostMagic));

  nlohmann::ordered_json header;
  header["version"] = 1;
  header["kind"] = "boost_ensemble";
  header["mode"] = config.mode == GrowthMode::leafwise ? "leafwise" : "levelwise";
  header["alpha"] = config.alpha;
  header["n_iterations"] = config.n_iterations;
  header["learning_rate"] = config.learning_rate;
  header["max_depth"] = config.max_depth;
  header["max_leaves"] = config.max_leaves;
  header["min_data_in_leaf"] = config.min_data_in_leaf;
  header["feature_fraction"] = config.feature_fraction;
  header["bagging_fraction"] = config.bagging_fraction;
  header["min_split_gain"] = config.min_split_gain;
  header["max_bins"] = config.max_bins;
  header["seed"] = config.seed;
  header["base_prediction"] = base_prediction;
  header["total_gain"] = total_gain;
  header["training_curve"] = training_curve;
  header["binning_edges"] = binning.edges;
  const std::string htext = header.dump();
  write_raw(out, static_cast<std::uint64_t>(htext.size()));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));

  write_raw(out, static_cast<std::uint64_t>(trees.size()));
  for (const auto& tree : trees) {
    write_raw(out, static_cast<std::uint64_t>(tree.nodes.size()));
    for (const auto& nd : tree.nodes) {
      write_raw(out, nd.feature);
      write_raw(out, nd.threshold);
      write_raw(out, nd.split_bin);
      write_raw(out, nd.left);
      write_raw(out, nd.right);
      write_raw(out, nd.value);
      write_raw(out, nd.gain);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

BoostEnsemble BoostEnsemble::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kBoostMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a boost container: " + path.string());
  }
  std::uint64_t hlen = 0;
  read_raw(in, hlen);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  const auto header = nlohmann::ordered_json::parse(htext);
  if (header.at("version").get<int>() != 1) {
    throw std::runtime_error("unsupported boost container version");
  }

  BoostEnsemble e;
  e.config.mode = header.at("mode").get<std::string>() == "leafwise" ? GrowthMode::leafwise
                                                                     : GrowthMode::levelwise;
  e.config.alpha = header.at("alpha").get<double>();
  e.config.n_iterations = header.at("n_iterations").get<int>();
  e.config.learning_rate = header.at("learning_rate").get<double>();
  e.config.max_depth = header.at("max_depth").get<int>();
  e.config.max_leaves = header.at("max_leaves").get<int>();
  e.config.min_data_in_leaf = header.at("min_data_in_leaf").get<int>();
  e.config.feature_fraction = header.at("feature_fraction").get<double>();
  e.config.bagging_fraction = header.at("bagging_fraction").get<double>();
  e.config.min_split_gain = header.at("min_split_gain").get<double>();
  e.config.max_bins = header.at("max_bins").get<int>();
  e.config.seed = header.at("seed").get<std::uint64_t>();
  e.base_prediction = header.at("base_prediction").get<double>();
  e.total_gain = header.at("total_gain").get<std::vector<double>>();
  e.training_curve = header.at("training_curve").get<std::vector<double>>();
  e.binning.edges = header.at("binning_edges").get<std::vector<std::vector<double>>>();

  std::uint64_t n_trees = 0;
  read_raw(in, n_trees);
  e.trees.resize(n_trees);
  for (auto& tree : e.trees) {
    std::uint64_t n_nodes = 0;
    read_raw(in, n_nodes);
    tree.nodes.resize(n_nodes);
    for (auto& nd : tree.nodes) {
      read_raw(in, nd.feature);
      read_raw(in, nd.threshold);
      read_raw(in, nd.split_bin);
      read_raw(in, nd.left);
      read_raw(in, nd.right);
      read_raw(in, nd.value);
      read_raw(in, nd.gain);
    }
  }
  if (!in) throw std::runtime_error("truncated boost container: " + path.string());
  return e;
}

}  // namespace precipuq
