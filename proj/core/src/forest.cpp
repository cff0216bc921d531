#include "modkit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "modkit/parallel.hpp"

namespace modkit {

std::size_t MaxFeatures::resolve(std::size_t n_features) const {
  std::size_t k = n_features;
  switch (rule) {
    case Rule::Sqrt:
      k = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(n_features))));
      break;
    case Rule::All:
      k = n_features;
      break;
    case Rule::Fixed:
      k = fixed;
      break;
  }
  return std::clamp<std::size_t>(k, 1, n_features);
}

double gini_impurity(std::span<const std::uint32_t> class_counts) {
  std::uint64_t total = 0;
  for (const auto c : class_counts) total += c;
  if (total == 0) {
    raise(ErrorCode::EmptyNode, "gini impurity of an empty node");
  }
  double sum_sq = 0.0;
  const double inv = 1.0 / static_cast<double>(total);
  for (const auto c : class_counts) {
    const double p = static_cast<double>(c) * inv;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace {

// Split quality is compared exactly. Minimizing the count-weighted child
// Gini (nL*GL + nR*GR)/n is equivalent to maximizing
//   score = (SL*nR + SR*nL) / (nL*nR),  S = sum of squared class counts,
// and a split strictly reduces impurity iff score * n > Sp * nL * nR with
// Sp the parent's squared-count sum. 128-bit integers keep both
// comparisons exact, so tie-breaking never depends on rounding.
struct SplitScore {
  unsigned __int128 num = 0;
  unsigned __int128 den = 1;

  bool better_than(const SplitScore& other) const {
    return num * other.den > other.num * den;
  }
};

struct ScanState {
  std::vector<std::uint64_t> left_counts;
  std::vector<std::uint64_t> right_counts;
};

}  // namespace

std::optional<SplitCandidate> best_split(
    const std::vector<std::vector<double>>& feature_columns,
    const std::vector<std::uint32_t>& labels, const std::vector<std::size_t>& rows,
    const std::vector<std::size_t>& candidate_features, std::size_t n_classes) {
  const std::size_t n = rows.size();
  if (n < 2 || candidate_features.empty()) return std::nullopt;

  std::vector<std::uint64_t> parent_counts(n_classes, 0);
  for (const auto r : rows) parent_counts[labels[r]]++;
  unsigned __int128 parent_sq = 0;
  for (const auto c : parent_counts) {
    parent_sq += static_cast<unsigned __int128>(c) * c;
  }
  // pure node
  if (parent_sq == static_cast<unsigned __int128>(n) * n) return std::nullopt;

  std::optional<SplitCandidate> best;
  SplitScore best_score;
  bool have_best = false;

  std::vector<std::size_t> sorted_rows(rows);
  ScanState scan;
  scan.left_counts.assign(n_classes, 0);
  scan.right_counts.assign(n_classes, 0);

  // candidates are visited in ascending feature order so that exact score
  // ties keep the lower feature index, then the lower threshold
  for (const auto f : candidate_features) {
    const auto& col = feature_columns[f];
    std::sort(sorted_rows.begin(), sorted_rows.end(),
              [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    if (col[sorted_rows.front()] == col[sorted_rows.back()]) continue;  // constant

    std::fill(scan.left_counts.begin(), scan.left_counts.end(), 0);
    scan.right_counts.assign(parent_counts.begin(), parent_counts.end());
    unsigned __int128 left_sq = 0;
    unsigned __int128 right_sq = parent_sq;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::uint32_t label = labels[sorted_rows[i]];
      // move row i from right to left, maintaining squared-count sums
      left_sq += 2 * static_cast<unsigned __int128>(scan.left_counts[label]) + 1;
      right_sq -= 2 * static_cast<unsigned __int128>(scan.right_counts[label]) - 1;
      scan.left_counts[label]++;
      scan.right_counts[label]--;

      const double v = col[sorted_rows[i]];
      const double v_next = col[sorted_rows[i + 1]];
      if (v == v_next) continue;  // not a boundary between distinct values

      const std::uint64_t n_left = i + 1;
      const std::uint64_t n_right = n - n_left;
      SplitScore score;
      score.num = left_sq * n_right + right_sq * n_left;
      score.den = static_cast<unsigned __int128>(n_left) * n_right;

      // must strictly beat the parent: score/den > parent_sq/n
      if (score.num * static_cast<unsigned __int128>(n) <= parent_sq * score.den) {
        continue;
      }
      if (!have_best || score.better_than(best_score)) {
        double threshold = v + (v_next - v) / 2.0;
        // adjacent representables: midpoint may round up to v_next, which
        // would send the right block left; fall back to the left value
        if (!(threshold < v_next)) threshold = v;
        const double weighted_child =
            (static_cast<double>(n_left) *
                 (1.0 - static_cast<double>(left_sq) /
                            (static_cast<double>(n_left) * static_cast<double>(n_left))) +
             static_cast<double>(n_right) *
                 (1.0 - static_cast<double>(right_sq) / (static_cast<double>(n_right) *
                                                         static_cast<double>(n_right)))) /
            static_cast<double>(n);
        const double parent_gini =
            1.0 - static_cast<double>(parent_sq) /
                      (static_cast<double>(n) * static_cast<double>(n));
        best = SplitCandidate{{f, threshold}, parent_gini - weighted_child};
        best_score = score;
        have_best = true;
      }
    }
  }
  return best;
}

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>& columns;
  const std::vector<std::uint32_t>& labels;
  std::size_t n_classes;
  const ForestParams& params;
  std::size_t k_features;
  rng::Stream& stream;
  Tree tree;
  std::vector<std::size_t> feature_pool;

  TreeBuilder(const std::vector<std::vector<double>>& cols,
              const std::vector<std::uint32_t>& lbls, std::size_t classes,
              const ForestParams& p, rng::Stream& s)
      : columns(cols), labels(lbls), n_classes(classes), params(p),
        k_features(p.max_features.resolve(cols.size())), stream(s) {
    feature_pool.resize(columns.size());
    std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
  }

  std::vector<std::size_t> draw_candidates() {
    // partial Fisher-Yates, then sorted so the split scan is index-ordered
    for (std::size_t i = 0; i < k_features; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(stream.uniform_below(feature_pool.size() - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    std::vector<std::size_t> candidates(feature_pool.begin(),
                                        feature_pool.begin() +
                                            static_cast<std::ptrdiff_t>(k_features));
    std::sort(candidates.begin(), candidates.end());
    return candidates;
  }

  std::vector<std::uint32_t> count_classes(const std::vector<std::size_t>& rows) const {
    std::vector<std::uint32_t> counts(n_classes, 0);
    for (const auto r : rows) counts[labels[r]]++;
    return counts;
  }

  std::int32_t make_leaf(std::vector<std::uint32_t> counts) {
    TreeNode node;
    node.class_counts = std::move(counts);
    tree.nodes.push_back(std::move(node));
    return static_cast<std::int32_t>(tree.nodes.size() - 1);
  }

  std::int32_t build(const std::vector<std::size_t>& rows, std::size_t depth) {
    auto counts = count_classes(rows);
    const bool pure =
        std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool depth_capped = params.max_depth && depth >= *params.max_depth;
    if (pure || rows.size() < params.min_samples_split || depth_capped) {
      return make_leaf(std::move(counts));
    }

    const auto candidates = draw_candidates();
    const auto split = best_split(columns, labels, rows, candidates, n_classes);
    if (!split) return make_leaf(std::move(counts));

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    const auto& col = columns[split->rule.feature_index];
    for (const auto r : rows) {
      (col[r] <= split->rule.threshold ? left_rows : right_rows).push_back(r);
    }

    // reserve this node's slot before recursing so nodes[0] stays the root
    tree.nodes.emplace_back();
    const auto self = static_cast<std::int32_t>(tree.nodes.size() - 1);
    tree.nodes[self].rule = split->rule;
    const std::int32_t left = build(left_rows, depth + 1);
    const std::int32_t right = build(right_rows, depth + 1);
    tree.nodes[self].left = left;
    tree.nodes[self].right = right;
    return self;
  }
};

Tree train_tree(const std::vector<std::vector<double>>& columns,
                const std::vector<std::uint32_t>& labels, std::size_t n_classes,
                const ForestParams& params, rng::Stream stream) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> rows(n);
  if (params.bootstrap) {
    for (auto& r : rows) {
      r = static_cast<std::size_t>(stream.uniform_below(n));
    }
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }

  TreeBuilder builder(columns, labels, n_classes, params, stream);
  builder.build(rows, 0);
  return std::move(builder.tree);
}

}  // namespace

std::uint32_t Tree::predict_counts_index(std::span<const double> sample) const noexcept {
  std::int32_t at = 0;
  while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
    const auto& node = nodes[static_cast<std::size_t>(at)];
    at = (sample[node.rule.feature_index] <= node.rule.threshold) ? node.left : node.right;
  }
  const auto& counts = nodes[static_cast<std::size_t>(at)].class_counts;
  return static_cast<std::uint32_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<std::size_t> Tree::used_features() const {
  std::set<std::size_t> used;
  for (const auto& node : nodes) {
    if (!node.is_leaf()) used.insert(node.rule.feature_index);
  }
  return {used.begin(), used.end()};
}

std::uint32_t Forest::predict(std::span<const double> sample) const {
  if (sample.size() != feature_names.size()) {
    raise(ErrorCode::DimensionMismatch,
          "sample has " + std::to_string(sample.size()) + " features, forest expects " +
              std::to_string(feature_names.size()));
  }
  std::vector<std::uint32_t> votes(categories.size(), 0);
  for (const auto& tree : trees) {
    votes[tree.predict_counts_index(sample)]++;
  }
  return static_cast<std::uint32_t>(
      std::max_element(votes.begin(), votes.end()) - votes.begin());
}

Forest train_forest(const Dataset& ds, const std::vector<std::size_t>& rows,
                    const std::string& target_factor,
                    const std::vector<std::string>& feature_subset,
                    const ForestParams& params, std::uint64_t seed,
                    unsigned n_threads) {
  if (rows.size() < 2) {
    raise(ErrorCode::SingleSample, "forest training needs at least 2 samples");
  }
  if (params.n_trees < 1) {
    raise(ErrorCode::InvalidDataset, "forest must have at least one tree");
  }

  const FactorColumn& target = ds.factor(target_factor);

  std::vector<std::string> names =
      feature_subset.empty() ? ds.feature_names() : feature_subset;
  if (names.empty()) {
    raise(ErrorCode::NoFeatures, "dataset has no feature columns");
  }

  // materialize the training block column-major for the split scans
  std::vector<std::vector<double>> columns;
  columns.reserve(names.size());
  for (const auto& name : names) {
    const FeatureColumn& f = ds.feature(name);
    std::vector<double> col;
    col.reserve(rows.size());
    for (const auto r : rows) col.push_back(f.values[r]);
    columns.push_back(std::move(col));
  }
  std::vector<std::uint32_t> labels;
  labels.reserve(rows.size());
  for (const auto r : rows) labels.push_back(target.values[r]);

  Forest forest;
  forest.params = params;
  forest.target_factor = target_factor;
  forest.categories = target.categories;
  forest.feature_names = std::move(names);
  forest.train_seed = seed;
  forest.trees.resize(params.n_trees);

  parallel_for(params.n_trees, n_threads, [&](std::size_t t) {
    auto stream = rng::Stream::derive(seed, {rng::salt::kTree, t});
    forest.trees[t] =
        train_tree(columns, labels, target.categories.size(), params, std::move(stream));
  });
  return forest;
}

std::vector<std::uint32_t> predict_rows(const Forest& forest, const Dataset& ds,
                                        const std::vector<std::size_t>& rows) {
  std::vector<const std::vector<double>*> columns;
  columns.reserve(forest.feature_names.size());
  for (const auto& name : forest.feature_names) {
    columns.push_back(&ds.feature(name).values);
  }
  std::vector<std::uint32_t> predictions;
  predictions.reserve(rows.size());
  std::vector<double> sample(columns.size());
  for (const auto r : rows) {
    for (std::size_t f = 0; f < columns.size(); ++f) sample[f] = (*columns[f])[r];
    predictions.push_back(forest.predict(sample));
  }
  return predictions;
}

}  // namespace modkit
