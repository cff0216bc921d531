#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modkit/data_model.hpp"
#include "modkit/forest.hpp"

namespace modkit {

/// K x K confusion table, counts[truth * K + predicted].
struct ConfusionCounts {
  std::size_t n_classes = 0;
  std::vector<std::size_t> counts;

  static ConfusionCounts from(std::span<const std::uint32_t> predictions,
                              std::span<const std::uint32_t> truths,
                              std::size_t n_classes);

  std::size_t at(std::uint32_t truth, std::uint32_t predicted) const {
    return counts[truth * n_classes + predicted];
  }
  std::size_t tp(std::uint32_t positive) const;
  std::size_t fp(std::uint32_t positive) const;
  std::size_t fn(std::uint32_t positive) const;
  std::size_t tn(std::uint32_t positive) const;
  std::size_t total() const;
};

/// Constant classifier predicting the modal training class (ties resolve
/// to the lowest category id). The maximum-a-priori baseline every model
/// must beat to count as an empirical modulator.
struct PriorClassifier {
  std::uint32_t modal_class = 0;

  std::uint32_t predict() const noexcept { return modal_class; }
};

PriorClassifier prior_estimator(std::span<const std::uint32_t> train_labels,
                                std::size_t n_classes);

/// Fraction of exact matches. Throws LengthMismatch / Empty.
double accuracy(std::span<const std::uint32_t> predictions,
                std::span<const std::uint32_t> truths);

/// 2TP / (2TP + FP + FN); 0.0 when there is no positive support at all
/// (TP = FP = FN = 0).
double f1_score(std::span<const std::uint32_t> predictions,
                std::span<const std::uint32_t> truths, std::uint32_t positive);

/// Unweighted mean of the per-class one-vs-rest F1 scores.
double macro_f1(std::span<const std::uint32_t> predictions,
                std::span<const std::uint32_t> truths, std::size_t n_classes);

struct RepetitionRecord {
  std::size_t repetition = 0;
  double f1_model = 0.0;
  double f1_baseline = 0.0;
  double acc_model = 0.0;
  double acc_baseline = 0.0;
};

struct MetricSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

enum class Verdict { EmpiricalModulator, NotDetected };

const char* verdict_name(Verdict v) noexcept;

struct EvalConfig {
  ForestParams forest{};
  double train_fraction = 0.75;
  std::size_t repetitions = 100;
  /// empty = all features
  std::vector<std::string> feature_subset;
  /// binary F1 positive class; defaults to category id 1
  std::optional<std::uint32_t> positive_class;
  bool stratified_split = false;
  unsigned n_threads = 1;
};

/// Outcome of the repeated-partitioning harness: per-repetition metrics
/// for the forest and the prior baseline, their aggregates, and the
/// empirical-modulator verdict. The verdict tests whether the median of
/// the per-repetition accuracy ratios acc_model/acc_baseline exceeds 1;
/// the F1 ratio is reported alongside but is not the criterion.
struct EvaluationReport {
  std::vector<RepetitionRecord> repetitions;
  MetricSummary f1_model;
  MetricSummary f1_baseline;
  MetricSummary acc_model;
  MetricSummary acc_baseline;
  double median_accuracy_ratio = 0.0;
  double median_f1_ratio = 0.0;
  Verdict verdict = Verdict::NotDetected;
  std::size_t degree_n = 0;  // held-out samples per repetition
  std::string target_factor;
  std::uint32_t positive_class = 1;
  bool macro_averaged = false;
  bool zero_support_f1 = false;  // some repetition had no positive support
  EvalConfig config;
  std::uint64_t master_seed = 0;
};

/// Linear-interpolation quantile of the sorted copy of `values`.
double quantile(std::vector<double> values, double q);

MetricSummary summarize(const std::vector<double>& values);

/// For each repetition i: draw a fresh unstratified split with a stream
/// derived from (master_seed, i), train a forest on the training side,
/// and score forest and prior baseline on the held-out side. Repetitions
/// are independent jobs merged by index, so thread count cannot change
/// the report.
EvaluationReport repeated_evaluation(const Dataset& ds, const std::string& target_factor,
                                     const EvalConfig& config, std::uint64_t master_seed);

struct TransferConfig {
  ForestParams forest{};
  double train_fraction = 0.75;
  std::size_t repetitions = 100;
  /// per-stratum permutation-importance selection before training
  bool select_features = true;
  std::size_t subset_size = 4;
  std::size_t importance_forests = 100;
  std::size_t importance_permutations = 10;
  std::optional<std::uint32_t> positive_class;
  unsigned n_threads = 1;
};

/// Cross-stratum transfer grid: entry (test r, train c) is the mean F1
/// over repetitions of a forest trained inside stratum c, scored on
/// stratum c's held-out split when r == c and on all of stratum r
/// otherwise. Forests are trained once per (c, repetition) and reused
/// across test strata.
struct TransferMatrix {
  std::vector<std::string> strata;  // stratum category labels
  std::vector<double> mean_f1;      // row-major, [test * K + train]
  std::vector<std::vector<std::string>> selected_features;  // per train stratum
  std::string stratum_factor;
  std::string target_factor;
  TransferConfig config;
  std::uint64_t master_seed = 0;

  double at(std::size_t test, std::size_t train) const {
    return mean_f1[test * strata.size() + train];
  }
};

TransferMatrix transfer_matrix(const Dataset& ds, const std::string& stratum_factor,
                               const std::string& target_factor,
                               const TransferConfig& config, std::uint64_t master_seed);

}  // namespace modkit
