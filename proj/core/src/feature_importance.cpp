#include "modkit/feature_importance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "modkit/parallel.hpp"

namespace modkit {

namespace {

// Cached per-tree votes for one (forest, evaluation rows) pair. A
// permutation of one feature only re-walks the trees that split on it;
// their vote deltas are applied to the tally and the majority recomputed.
struct EvalCache {
  const Forest* forest = nullptr;
  std::vector<const std::vector<double>*> columns;  // by forest feature order
  std::vector<std::size_t> rows;
  std::vector<std::uint32_t> truths;
  std::vector<std::vector<std::uint32_t>> tree_votes;    // [tree][sample]
  std::vector<std::uint32_t> tallies;                    // [sample * K + class]
  std::vector<std::vector<std::size_t>> trees_by_feature;  // forest feature -> trees
  double baseline_accuracy = 0.0;

  void build(const Forest& f, const Dataset& ds, std::vector<std::size_t> eval_rows,
             const FactorColumn& target) {
    forest = &f;
    rows = std::move(eval_rows);
    columns.clear();
    for (const auto& name : f.feature_names) {
      columns.push_back(&ds.feature(name).values);
    }
    truths.clear();
    truths.reserve(rows.size());
    for (const auto r : rows) truths.push_back(target.values[r]);

    const std::size_t n = rows.size();
    const std::size_t k = f.categories.size();
    tree_votes.assign(f.trees.size(), std::vector<std::uint32_t>(n));
    tallies.assign(n * k, 0);
    std::vector<double> sample(columns.size());
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t c = 0; c < columns.size(); ++c) sample[c] = (*columns[c])[rows[s]];
      for (std::size_t t = 0; t < f.trees.size(); ++t) {
        const auto vote = f.trees[t].predict_counts_index(sample);
        tree_votes[t][s] = vote;
        tallies[s * k + vote]++;
      }
    }

    trees_by_feature.assign(columns.size(), {});
    for (std::size_t t = 0; t < f.trees.size(); ++t) {
      for (const auto used : f.trees[t].used_features()) {
        trees_by_feature[used].push_back(t);
      }
    }

    std::size_t hits = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (majority(tallies, s, k) == truths[s]) hits++;
    }
    baseline_accuracy = static_cast<double>(hits) / static_cast<double>(n);
  }

  static std::uint32_t majority(const std::vector<std::uint32_t>& tally, std::size_t s,
                                std::size_t k) {
    const auto begin = tally.begin() + static_cast<std::ptrdiff_t>(s * k);
    return static_cast<std::uint32_t>(std::max_element(begin, begin + static_cast<std::ptrdiff_t>(k)) - begin);
  }

  std::uint32_t walk_override(const Tree& tree, std::size_t sample, std::size_t over_feature,
                              double over_value) const {
    std::int32_t at = 0;
    while (!tree.nodes[static_cast<std::size_t>(at)].is_leaf()) {
      const auto& node = tree.nodes[static_cast<std::size_t>(at)];
      const std::size_t f = node.rule.feature_index;
      const double v = f == over_feature ? over_value : (*columns[f])[rows[sample]];
      at = v <= node.rule.threshold ? node.left : node.right;
    }
    const auto& counts = tree.nodes[static_cast<std::size_t>(at)].class_counts;
    return static_cast<std::uint32_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  /// Accuracy with feature `f_idx` replaced by `permuted` (indexed by
  /// evaluation-sample position).
  double permuted_accuracy(std::size_t f_idx, const std::vector<double>& permuted) const {
    const auto& affected = trees_by_feature[f_idx];
    if (affected.empty()) return baseline_accuracy;

    const std::size_t n = rows.size();
    const std::size_t k = forest->categories.size();
    std::vector<std::uint32_t> tally = tallies;
    for (const auto t : affected) {
      const auto& tree = forest->trees[t];
      for (std::size_t s = 0; s < n; ++s) {
        const auto fresh = walk_override(tree, s, f_idx, permuted[s]);
        const auto old = tree_votes[t][s];
        if (fresh != old) {
          tally[s * k + old]--;
          tally[s * k + fresh]++;
        }
      }
    }
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (majority(tally, s, k) == truths[s]) hits++;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
  }

  std::vector<double> gather_feature(std::size_t f_idx) const {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto r : rows) values.push_back((*columns[f_idx])[r]);
    return values;
  }
};

std::vector<std::size_t> all_rows(const Dataset& ds) {
  std::vector<std::size_t> rows(ds.n_samples());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

double compensated_mean(const std::vector<double>& values) {
  double sum = 0.0, comp = 0.0;
  for (const double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double sum = 0.0;
  for (const double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

}  // namespace

PermutationImportanceResult permutation_importance(const Forest& forest, const Dataset& ds,
                                                   const std::string& feature_name,
                                                   std::size_t n_permutations,
                                                   rng::Stream& stream) {
  const auto it = std::find(forest.feature_names.begin(), forest.feature_names.end(),
                            feature_name);
  if (it == forest.feature_names.end()) {
    raise(ErrorCode::UnknownFeature,
          "forest was not trained on feature '" + feature_name + "'");
  }
  const auto f_idx = static_cast<std::size_t>(it - forest.feature_names.begin());

  EvalCache cache;
  cache.build(forest, ds, all_rows(ds), ds.factor(forest.target_factor));

  PermutationImportanceResult result;
  result.baseline_accuracy = cache.baseline_accuracy;
  result.drops.reserve(n_permutations);
  std::vector<double> permuted = cache.gather_feature(f_idx);
  for (std::size_t p = 0; p < n_permutations; ++p) {
    stream.shuffle(permuted);
    result.drops.push_back(cache.baseline_accuracy - cache.permuted_accuracy(f_idx, permuted));
  }
  result.mean_drop = result.drops.empty() ? 0.0 : compensated_mean(result.drops);
  return result;
}

ImportanceRanking rank_features(const Dataset& ds, const std::string& target_factor,
                                std::size_t n_forests, std::size_t n_permutations,
                                std::uint64_t master_seed, const RankOptions& options) {
  if (n_forests < 1 || n_permutations < 1) {
    raise(ErrorCode::InvalidDataset, "need at least one forest and one permutation");
  }
  const FactorColumn& target = ds.factor(target_factor);

  // canonical name order decouples the result from dataset column order
  std::vector<std::string> names = ds.feature_names();
  if (names.empty()) {
    raise(ErrorCode::NoFeatures, "dataset has no feature columns");
  }
  std::sort(names.begin(), names.end());
  const std::size_t d = names.size();

  // drops[forest][feature][perm], merged in fixed order afterwards
  std::vector<std::vector<std::vector<double>>> drops(
      n_forests, std::vector<std::vector<double>>(d));
  std::vector<double> baselines(n_forests, 0.0);

  parallel_for(n_forests, options.n_threads, [&](std::size_t i) {
    auto part_stream = rng::Stream::derive(master_seed, {rng::salt::kPartition, i});
    const Partition part = partition(ds, options.train_fraction, part_stream);
    const Forest forest =
        train_forest(ds, part.train_indices, target_factor, names, options.forest,
                     rng::derive_seed(master_seed, {rng::salt::kTrain, i}), 1);

    EvalCache cache;
    cache.build(forest, ds,
                options.evaluate_on_full_dataset ? all_rows(ds) : part.test_indices,
                target);
    baselines[i] = cache.baseline_accuracy;

    for (std::size_t f = 0; f < d; ++f) {
      auto& feature_drops = drops[i][f];
      feature_drops.reserve(n_permutations);
      std::vector<double> permuted = cache.gather_feature(f);
      auto perm_stream = rng::Stream::derive(master_seed, {rng::salt::kPermutation, i, f});
      for (std::size_t p = 0; p < n_permutations; ++p) {
        perm_stream.shuffle(permuted);
        feature_drops.push_back(cache.baseline_accuracy -
                                cache.permuted_accuracy(f, permuted));
      }
    }
  });

  ImportanceRanking ranking;
  ranking.n_forests = n_forests;
  ranking.n_permutations = n_permutations;
  ranking.target_factor = target_factor;
  ranking.master_seed = master_seed;
  ranking.baseline_accuracy = compensated_mean(baselines);

  ranking.entries.reserve(d);
  std::vector<double> merged;
  merged.reserve(n_forests * n_permutations);
  for (std::size_t f = 0; f < d; ++f) {
    merged.clear();
    for (std::size_t i = 0; i < n_forests; ++i) {
      merged.insert(merged.end(), drops[i][f].begin(), drops[i][f].end());
    }
    ImportanceEntry entry;
    entry.feature_name = names[f];
    entry.mean_accuracy_drop = compensated_mean(merged);
    entry.std_dev = sample_std(merged, entry.mean_accuracy_drop);
    entry.n_measurements = merged.size();
    ranking.entries.push_back(std::move(entry));
  }

  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const ImportanceEntry& a, const ImportanceEntry& b) {
              if (a.mean_accuracy_drop != b.mean_accuracy_drop) {
                return a.mean_accuracy_drop > b.mean_accuracy_drop;
              }
              return a.feature_name < b.feature_name;
            });
  return ranking;
}

std::vector<std::string> select_optimal_subset(const ImportanceRanking& ranking,
                                               std::size_t m) {
  if (m < 1 || m > ranking.entries.size()) {
    raise(ErrorCode::BadSubsetSize,
          "subset size " + std::to_string(m) + " outside [1, " +
              std::to_string(ranking.entries.size()) + "]");
  }
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    names.push_back(ranking.entries[i].feature_name);
  }
  return names;
}

std::size_t suggest_subset_size_elbow(const ImportanceRanking& ranking) {
  if (ranking.entries.empty()) {
    raise(ErrorCode::BadSubsetSize, "empty ranking");
  }
  std::size_t best_m = 1;
  double best_gap = -1.0;
  for (std::size_t i = 0; i + 1 < ranking.entries.size(); ++i) {
    const double gap = ranking.entries[i].mean_accuracy_drop -
                       ranking.entries[i + 1].mean_accuracy_drop;
    if (gap > best_gap) {
      best_gap = gap;
      best_m = i + 1;
    }
  }
  return best_m;
}

std::vector<std::string> exhaustive_optimal_subset(const Dataset& ds,
                                                   const std::string& target_factor,
                                                   const ExhaustiveOptions& options,
                                                   std::uint64_t master_seed) {
  const auto names = ds.feature_names();
  const std::size_t d = names.size();
  if (d == 0) {
    raise(ErrorCode::NoFeatures, "dataset has no feature columns");
  }
  if (d > 12) {
    raise(ErrorCode::SubsetSearchTooLarge,
          "exhaustive subset search over " + std::to_string(d) +
              " features exceeds the cap of 12");
  }

  std::vector<std::uint32_t> masks;
  masks.reserve((std::size_t{1} << d) - 1);
  for (std::uint32_t m = 1; m < (std::uint32_t{1} << d); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) < std::popcount(b);
  });

  EvalConfig eval;
  eval.forest = options.forest;
  eval.train_fraction = options.train_fraction;
  eval.repetitions = options.repetitions;
  eval.n_threads = options.n_threads;

  std::vector<std::string> best_subset;
  double best_mean_acc = -1.0;
  for (const auto mask : masks) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (std::uint32_t{1} << i)) subset.push_back(names[i]);
    }
    eval.feature_subset = subset;
    // shared master seed: every subset sees the same partitions
    const auto report = repeated_evaluation(ds, target_factor, eval, master_seed);
    std::vector<double> accs;
    accs.reserve(report.repetitions.size());
    for (const auto& r : report.repetitions) accs.push_back(r.acc_model);
    const double mean_acc = compensated_mean(accs);
    if (mean_acc > best_mean_acc) {  // strict: ties keep smaller, earlier subsets
      best_mean_acc = mean_acc;
      best_subset = std::move(subset);
    }
  }
  return best_subset;
}

}  // namespace modkit
