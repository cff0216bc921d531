#include "modkit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modkit/feature_importance.hpp"
#include "modkit/parallel.hpp"

namespace modkit {

ConfusionCounts ConfusionCounts::from(std::span<const std::uint32_t> predictions,
                                      std::span<const std::uint32_t> truths,
                                      std::size_t n_classes) {
  if (predictions.size() != truths.size()) {
    raise(ErrorCode::LengthMismatch, "predictions and truths differ in length");
  }
  if (predictions.empty()) {
    raise(ErrorCode::Empty, "confusion counts of an empty set");
  }
  ConfusionCounts c;
  c.n_classes = n_classes;
  c.counts.assign(n_classes * n_classes, 0);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    c.counts[truths[i] * n_classes + predictions[i]]++;
  }
  return c;
}

std::size_t ConfusionCounts::tp(std::uint32_t positive) const { return at(positive, positive); }

std::size_t ConfusionCounts::fp(std::uint32_t positive) const {
  std::size_t sum = 0;
  for (std::uint32_t t = 0; t < n_classes; ++t) {
    if (t != positive) sum += at(t, positive);
  }
  return sum;
}

std::size_t ConfusionCounts::fn(std::uint32_t positive) const {
  std::size_t sum = 0;
  for (std::uint32_t p = 0; p < n_classes; ++p) {
    if (p != positive) sum += at(positive, p);
  }
  return sum;
}

std::size_t ConfusionCounts::tn(std::uint32_t positive) const {
  return total() - tp(positive) - fp(positive) - fn(positive);
}

std::size_t ConfusionCounts::total() const {
  std::size_t sum = 0;
  for (const auto c : counts) sum += c;
  return sum;
}

PriorClassifier prior_estimator(std::span<const std::uint32_t> train_labels,
                                std::size_t n_classes) {
  if (train_labels.empty()) {
    raise(ErrorCode::EmptyLabels, "prior estimator needs at least one label");
  }
  std::vector<std::size_t> counts(n_classes, 0);
  for (const auto l : train_labels) counts[l]++;
  // first max keeps the lowest category id on ties
  const auto modal = std::max_element(counts.begin(), counts.end()) - counts.begin();
  return PriorClassifier{static_cast<std::uint32_t>(modal)};
}

double accuracy(std::span<const std::uint32_t> predictions,
                std::span<const std::uint32_t> truths) {
  if (predictions.size() != truths.size()) {
    raise(ErrorCode::LengthMismatch, "predictions and truths differ in length");
  }
  if (predictions.empty()) {
    raise(ErrorCode::Empty, "accuracy of an empty set");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (predictions[i] == truths[i]) hits++;
  }
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

namespace {

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 0.0;  // no positive support anywhere
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

double f1_score(std::span<const std::uint32_t> predictions,
                std::span<const std::uint32_t> truths, std::uint32_t positive) {
  if (predictions.size() != truths.size()) {
    raise(ErrorCode::LengthMismatch, "predictions and truths differ in length");
  }
  if (predictions.empty()) {
    raise(ErrorCode::Empty, "F1 of an empty set");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool pred_pos = predictions[i] == positive;
    const bool true_pos = truths[i] == positive;
    if (pred_pos && true_pos) tp++;
    else if (pred_pos) fp++;
    else if (true_pos) fn++;
  }
  return f1_from_counts(tp, fp, fn);
}

double macro_f1(std::span<const std::uint32_t> predictions,
                std::span<const std::uint32_t> truths, std::size_t n_classes) {
  const auto c = ConfusionCounts::from(predictions, truths, n_classes);
  double sum = 0.0;
  for (std::uint32_t k = 0; k < n_classes; ++k) {
    sum += f1_from_counts(c.tp(k), c.fp(k), c.fn(k));
  }
  return sum / static_cast<double>(n_classes);
}

const char* verdict_name(Verdict v) noexcept {
  return v == Verdict::EmpiricalModulator ? "empirical_modulator" : "not_detected";
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    raise(ErrorCode::Empty, "quantile of an empty set");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

MetricSummary summarize(const std::vector<double>& values) {
  return {quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)};
}

namespace {

// model/baseline per repetition; baseline accuracy can be 0 when the modal
// train class is absent from the test split
double safe_ratio(double model, double baseline) {
  if (baseline > 0.0) return model / baseline;
  return model > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

struct ScoredSplit {
  RepetitionRecord record;
  bool zero_support = false;
};

ScoredSplit score_split(const Dataset& ds, const FactorColumn& target,
                        const Partition& part, const Forest& forest,
                        std::uint32_t positive, bool macro, std::size_t repetition) {
  const std::size_t k = target.categories.size();

  std::vector<std::uint32_t> train_labels, test_labels;
  train_labels.reserve(part.train_indices.size());
  test_labels.reserve(part.test_indices.size());
  for (const auto r : part.train_indices) train_labels.push_back(target.values[r]);
  for (const auto r : part.test_indices) test_labels.push_back(target.values[r]);

  const auto prior = prior_estimator(train_labels, k);
  const std::vector<std::uint32_t> baseline_preds(test_labels.size(), prior.predict());
  const auto model_preds = predict_rows(forest, ds, part.test_indices);

  ScoredSplit out;
  out.record.repetition = repetition;
  out.record.acc_model = accuracy(model_preds, test_labels);
  out.record.acc_baseline = accuracy(baseline_preds, test_labels);
  if (macro) {
    out.record.f1_model = macro_f1(model_preds, test_labels, k);
    out.record.f1_baseline = macro_f1(baseline_preds, test_labels, k);
  } else {
    out.record.f1_model = f1_score(model_preds, test_labels, positive);
    out.record.f1_baseline = f1_score(baseline_preds, test_labels, positive);
    const bool any_positive_truth =
        std::any_of(test_labels.begin(), test_labels.end(),
                    [&](std::uint32_t t) { return t == positive; });
    const bool any_positive_pred =
        prior.predict() == positive ||
        std::any_of(model_preds.begin(), model_preds.end(),
                    [&](std::uint32_t t) { return t == positive; });
    out.zero_support = !any_positive_truth && !any_positive_pred;
  }
  return out;
}

}  // namespace

EvaluationReport repeated_evaluation(const Dataset& ds, const std::string& target_factor,
                                     const EvalConfig& config, std::uint64_t master_seed) {
  if (config.repetitions < 1) {
    raise(ErrorCode::InvalidDataset, "need at least one repetition");
  }
  const FactorColumn& target = ds.factor(target_factor);
  if (target.n_categories_present() < 2) {
    raise(ErrorCode::SingleClassStratum,
          "target factor '" + target_factor + "' has fewer than 2 classes present");
  }

  const std::size_t k = target.categories.size();
  const bool macro = k > 2;
  const std::uint32_t positive = config.positive_class.value_or(1);

  EvaluationReport report;
  report.target_factor = target_factor;
  report.positive_class = positive;
  report.macro_averaged = macro;
  report.config = config;
  report.master_seed = master_seed;
  report.repetitions.resize(config.repetitions);

  std::vector<bool> zero_support(config.repetitions, false);
  std::vector<std::size_t> test_sizes(config.repetitions, 0);

  parallel_for(config.repetitions, config.n_threads, [&](std::size_t i) {
    auto part_stream = rng::Stream::derive(master_seed, {rng::salt::kPartition, i});
    const Partition part =
        config.stratified_split
            ? partition_stratified(ds, target_factor, config.train_fraction, part_stream)
            : partition(ds, config.train_fraction, part_stream);
    const Forest forest = train_forest(
        ds, part.train_indices, target_factor, config.feature_subset, config.forest,
        rng::derive_seed(master_seed, {rng::salt::kTrain, i}), 1);
    auto scored = score_split(ds, target, part, forest, positive, macro, i);
    report.repetitions[i] = scored.record;
    zero_support[i] = scored.zero_support;
    test_sizes[i] = part.test_indices.size();
  });

  report.zero_support_f1 =
      std::any_of(zero_support.begin(), zero_support.end(), [](bool b) { return b; });
  report.degree_n = test_sizes.front();

  std::vector<double> f1m, f1b, accm, accb, acc_ratio, f1_ratio;
  for (const auto& r : report.repetitions) {
    f1m.push_back(r.f1_model);
    f1b.push_back(r.f1_baseline);
    accm.push_back(r.acc_model);
    accb.push_back(r.acc_baseline);
    acc_ratio.push_back(safe_ratio(r.acc_model, r.acc_baseline));
    f1_ratio.push_back(safe_ratio(r.f1_model, r.f1_baseline));
  }
  report.f1_model = summarize(f1m);
  report.f1_baseline = summarize(f1b);
  report.acc_model = summarize(accm);
  report.acc_baseline = summarize(accb);
  report.median_accuracy_ratio = quantile(acc_ratio, 0.5);
  report.median_f1_ratio = quantile(f1_ratio, 0.5);
  report.verdict = report.median_accuracy_ratio > 1.0 ? Verdict::EmpiricalModulator
                                                      : Verdict::NotDetected;
  return report;
}

TransferMatrix transfer_matrix(const Dataset& ds, const std::string& stratum_factor,
                               const std::string& target_factor,
                               const TransferConfig& config, std::uint64_t master_seed) {
  const FactorColumn& stratum = ds.factor(stratum_factor);
  const FactorColumn& target = ds.factor(target_factor);
  const std::size_t n_strata = stratum.categories.size();
  if (n_strata < 2) {
    raise(ErrorCode::SingleClassStratum,
          "stratum factor '" + stratum_factor + "' needs at least 2 categories");
  }
  const std::size_t k_target = target.categories.size();
  const bool macro = k_target > 2;
  const std::uint32_t positive = config.positive_class.value_or(1);

  // materialize strata up front so an empty or one-class stratum fails fast
  std::vector<Dataset> strata;
  strata.reserve(n_strata);
  for (std::size_t c = 0; c < n_strata; ++c) {
    Dataset sub = stratify(ds, stratum_factor, stratum.categories[c]);
    if (sub.factor(target_factor).n_categories_present() < 2) {
      raise(ErrorCode::SingleClassStratum,
            "stratum '" + stratum.categories[c] + "' has fewer than 2 target classes");
    }
    strata.push_back(std::move(sub));
  }

  TransferMatrix out;
  out.strata = stratum.categories;
  out.stratum_factor = stratum_factor;
  out.target_factor = target_factor;
  out.config = config;
  out.master_seed = master_seed;
  out.mean_f1.assign(n_strata * n_strata, 0.0);
  out.selected_features.resize(n_strata);

  for (std::size_t c = 0; c < n_strata; ++c) {
    if (config.select_features) {
      RankOptions rank_opts;
      rank_opts.forest = config.forest;
      rank_opts.train_fraction = config.train_fraction;
      rank_opts.n_threads = config.n_threads;
      const auto ranking = rank_features(
          strata[c], target_factor, config.importance_forests,
          config.importance_permutations,
          rng::derive_seed(master_seed, {rng::salt::kSelection, c}), rank_opts);
      const std::size_t m = std::min(config.subset_size, ranking.entries.size());
      out.selected_features[c] = select_optimal_subset(ranking, m);
    } else {
      out.selected_features[c] = ds.feature_names();
    }
  }

  // per train stratum c and repetition i: one forest, scored on its own
  // held-out split (diagonal) and on every other full stratum
  std::vector<std::vector<double>> cell_sums(config.repetitions,
                                             std::vector<double>(n_strata * n_strata, 0.0));
  std::vector<std::vector<std::size_t>> all_rows(n_strata);
  for (std::size_t r = 0; r < n_strata; ++r) {
    all_rows[r].resize(strata[r].n_samples());
    for (std::size_t i = 0; i < all_rows[r].size(); ++i) all_rows[r][i] = i;
  }

  const std::size_t n_jobs = n_strata * config.repetitions;
  parallel_for(n_jobs, config.n_threads, [&](std::size_t job) {
    const std::size_t c = job / config.repetitions;
    const std::size_t i = job % config.repetitions;
    const Dataset& train_stratum = strata[c];
    const FactorColumn& sub_target = train_stratum.factor(target_factor);

    auto part_stream = rng::Stream::derive(master_seed, {rng::salt::kPartition, c, i});
    const Partition part = partition(train_stratum, config.train_fraction, part_stream);
    const Forest forest = train_forest(
        train_stratum, part.train_indices, target_factor, out.selected_features[c],
        config.forest, rng::derive_seed(master_seed, {rng::salt::kTrain, c, i}), 1);

    for (std::size_t r = 0; r < n_strata; ++r) {
      const bool diagonal = r == c;
      const Dataset& eval_ds = diagonal ? train_stratum : strata[r];
      const auto& eval_rows = diagonal ? part.test_indices : all_rows[r];
      const auto preds = predict_rows(forest, eval_ds, eval_rows);
      std::vector<std::uint32_t> truths;
      truths.reserve(eval_rows.size());
      const auto& truth_col =
          diagonal ? sub_target.values : strata[r].factor(target_factor).values;
      for (const auto row : eval_rows) truths.push_back(truth_col[row]);
      const double f1 = macro ? macro_f1(preds, truths, k_target)
                              : f1_score(preds, truths, positive);
      cell_sums[i][r * n_strata + c] = f1;
    }
  });

  // merge by repetition index
  for (std::size_t i = 0; i < config.repetitions; ++i) {
    for (std::size_t cell = 0; cell < out.mean_f1.size(); ++cell) {
      out.mean_f1[cell] += cell_sums[i][cell];
    }
  }
  for (auto& v : out.mean_f1) v /= static_cast<double>(config.repetitions);
  return out;
}

}  // namespace modkit
