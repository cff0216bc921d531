#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modkit/data_model.hpp"
#include "modkit/evaluation.hpp"
#include "modkit/forest.hpp"
#include "modkit/rng.hpp"

namespace modkit {

struct ImportanceEntry {
  std::string feature_name;
  double mean_accuracy_drop = 0.0;
  double std_dev = 0.0;
  std::size_t n_measurements = 0;
};

/// Per-feature mean accuracy drop under random permutation, sorted
/// descending (ties by name). n_measurements = forests x permutations for
/// every entry.
struct ImportanceRanking {
  std::vector<ImportanceEntry> entries;
  double baseline_accuracy = 0.0;  // mean over forests, un-permuted
  std::size_t n_forests = 0;
  std::size_t n_permutations = 0;
  std::string target_factor;
  std::uint64_t master_seed = 0;
};

struct PermutationImportanceResult {
  double baseline_accuracy = 0.0;
  double mean_drop = 0.0;
  std::vector<double> drops;  // one per permutation
};

/// Shuffles the named feature column across all rows of `ds`
/// n_permutations times and records baseline minus permuted accuracy.
/// Trees that never split on the feature are skipped, so a feature absent
/// from every split rule (or constant) drops exactly 0.
PermutationImportanceResult permutation_importance(const Forest& forest, const Dataset& ds,
                                                   const std::string& feature_name,
                                                   std::size_t n_permutations,
                                                   rng::Stream& stream);

struct RankOptions {
  ForestParams forest{};
  double train_fraction = 0.75;
  /// Permutation accuracy is measured on the entire dataset (train and
  /// test), matching the reference protocol; set false for a
  /// held-out-only variant.
  bool evaluate_on_full_dataset = true;
  unsigned n_threads = 1;
};

/// Trains n_forests forests on the full feature set (fresh random split
/// each) and aggregates permutation drops per feature over all forests
/// and permutations. Features are handled in name-sorted order and
/// permutation streams are keyed by that order, so reordering dataset
/// columns cannot change the result.
ImportanceRanking rank_features(const Dataset& ds, const std::string& target_factor,
                                std::size_t n_forests, std::size_t n_permutations,
                                std::uint64_t master_seed, const RankOptions& options = {});

/// Top-m features by mean accuracy drop (ties already resolved to
/// lexicographic name order inside the ranking). Throws BadSubsetSize.
std::vector<std::string> select_optimal_subset(const ImportanceRanking& ranking,
                                               std::size_t m);

/// Convenience m-selection rule: position of the largest gap between
/// consecutive sorted drops. Not part of the reference protocol.
std::size_t suggest_subset_size_elbow(const ImportanceRanking& ranking);

struct ExhaustiveOptions {
  ForestParams forest{};
  double train_fraction = 0.75;
  std::size_t repetitions = 20;
  unsigned n_threads = 1;
};

/// Exact search over all non-empty feature subsets, maximizing the mean
/// held-out accuracy across repetitions (shared partition seeds, so
/// subsets are compared on the same splits). Exponential: capped at 12
/// features; meant for validating the ranking heuristic on small
/// synthetics.
std::vector<std::string> exhaustive_optimal_subset(const Dataset& ds,
                                                   const std::string& target_factor,
                                                   const ExhaustiveOptions& options,
                                                   std::uint64_t master_seed);

}  // namespace modkit
