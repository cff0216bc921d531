#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modkit/data_model.hpp"
#include "modkit/rng.hpp"

namespace modkit {

/// Axis-aligned split: samples with value <= threshold go left.
struct SplitRule {
  std::size_t feature_index = 0;
  double threshold = 0.0;
};

/// Arena node; children as indices into Tree::nodes, -1 marks a leaf.
/// Leaves carry the per-category training counts that back their vote.
struct TreeNode {
  std::int32_t left = -1;
  std::int32_t right = -1;
  SplitRule rule{};
  std::vector<std::uint32_t> class_counts;

  bool is_leaf() const noexcept { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::uint32_t predict_counts_index(std::span<const double> sample) const noexcept;
  std::vector<std::size_t> used_features() const;
};

/// Number of features drawn (without replacement) as split candidates at
/// each node. Sqrt means ceil(sqrt(d)), guaranteeing at least one.
struct MaxFeatures {
  enum class Rule : std::uint8_t { Sqrt, All, Fixed } rule = Rule::Sqrt;
  std::size_t fixed = 0;

  static MaxFeatures sqrt_rule() { return {}; }
  static MaxFeatures all() { return {Rule::All, 0}; }
  static MaxFeatures fixed_count(std::size_t k) { return {Rule::Fixed, k}; }

  std::size_t resolve(std::size_t n_features) const;
};

struct ForestParams {
  std::size_t n_trees = 100;
  MaxFeatures max_features{};
  std::size_t min_samples_split = 2;
  std::optional<std::size_t> max_depth{};
  bool bootstrap = true;
};

/// Trained ensemble. Immutable after training; prediction is const and
/// thread-safe. Tree t's randomness comes only from the stream derived
/// from (train_seed, t), so any tree-training schedule yields the same
/// forest.
struct Forest {
  std::vector<Tree> trees;
  ForestParams params;
  std::string target_factor;
  std::vector<std::string> categories;     // target factor's category labels
  std::vector<std::string> feature_names;  // training feature order
  std::uint64_t train_seed = 0;

  /// Majority vote over trees; ties resolve to the lowest category id,
  /// as do leaf-level count ties. Throws DimensionMismatch.
  std::uint32_t predict(std::span<const double> sample) const;
};

/// 1 - sum((c_i / n)^2). Throws EmptyNode when all counts are zero.
double gini_impurity(std::span<const std::uint32_t> class_counts);

struct SplitCandidate {
  SplitRule rule;
  double impurity_decrease = 0.0;
};

/// Best threshold over the candidate features, at midpoints of
/// consecutive distinct sorted values, minimizing count-weighted child
/// Gini. Candidate scores compare by exact integer arithmetic, so ties
/// resolve deterministically to the lower feature index, then the lower
/// threshold. Returns nullopt when nothing separates the rows.
std::optional<SplitCandidate> best_split(
    const std::vector<std::vector<double>>& feature_columns,
    const std::vector<std::uint32_t>& labels, const std::vector<std::size_t>& rows,
    const std::vector<std::size_t>& candidate_features, std::size_t n_classes);

/// Grows params.n_trees trees on the given rows of `ds`, each on a fresh
/// bootstrap resample (when params.bootstrap) with per-node random feature
/// subsets. `feature_subset` empty means all features. Fully deterministic
/// given the seed; tree jobs may run on n_threads workers.
Forest train_forest(const Dataset& ds, const std::vector<std::size_t>& rows,
                    const std::string& target_factor,
                    const std::vector<std::string>& feature_subset,
                    const ForestParams& params, std::uint64_t seed,
                    unsigned n_threads = 1);

/// Predicts the given dataset rows, gathering features by the forest's
/// training feature names. Throws UnknownFeature if a column is missing.
std::vector<std::uint32_t> predict_rows(const Forest& forest, const Dataset& ds,
                                        const std::vector<std::size_t>& rows);

}  // namespace modkit
