#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modkit/error.hpp"
#include "modkit/rng.hpp"

namespace modkit {

/// Discrete host-level covariate (diet, disease type, time point, ...).
/// Values are indices into `categories`; `feasible` marks factors that can
/// be set by intervention. Category order is first appearance in the
/// source, and must stay stable for reproducibility.
struct FactorColumn {
  std::string name;
  std::vector<std::uint32_t> values;
  std::vector<std::string> categories;
  bool feasible = false;

  std::size_t n_categories_present() const;
};

enum class FeatureKind : std::uint8_t {
  BacterialAbundance,
  SerumMetabolite,
  ColonMetabolite,
  Generic,
};

const char* feature_kind_name(FeatureKind kind) noexcept;
std::optional<FeatureKind> feature_kind_from_name(const std::string& name) noexcept;

/// Non-negative measurement column (abundance or concentration). NaN and
/// negative values are rejected at construction.
struct FeatureColumn {
  std::string name;
  std::vector<double> values;
  FeatureKind kind = FeatureKind::Generic;
};

/// Immutable sample table: the empirical realization of the factor and
/// signal variables over a population of hosts. All mutation-like
/// operations return new datasets; sharing across threads is safe.
class Dataset {
 public:
  Dataset(std::vector<FactorColumn> factors, std::vector<FeatureColumn> features,
          std::string provenance = "");

  std::size_t n_samples() const noexcept { return n_samples_; }
  const std::string& provenance() const noexcept { return provenance_; }

  const std::vector<FactorColumn>& factors() const noexcept { return factors_; }
  const std::vector<FeatureColumn>& features() const noexcept { return features_; }

  bool has_factor(const std::string& name) const noexcept;
  bool has_feature(const std::string& name) const noexcept;

  /// Throws UnknownFactor / UnknownFeature.
  const FactorColumn& factor(const std::string& name) const;
  const FeatureColumn& feature(const std::string& name) const;
  std::size_t factor_index(const std::string& name) const;
  std::size_t feature_index(const std::string& name) const;

  std::vector<std::string> feature_names() const;

  /// New dataset containing the given rows, in the given order. Column
  /// metadata (names, categories, kinds, feasible flags) is preserved.
  Dataset select_rows(const std::vector<std::size_t>& rows) const;

 private:
  std::vector<FactorColumn> factors_;
  std::vector<FeatureColumn> features_;
  std::size_t n_samples_ = 0;
  std::string provenance_;
};

/// Disjoint, exhaustive train/test index split.
struct Partition {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Uniformly random unstratified split with |train| = round(n * fraction)
/// (half-to-even). Throws DegenerateSplit if either side would be empty.
/// Splits are drawn independently of any factor, so repeated draws can
/// yield unbalanced classes; that mirrors the evaluation protocol.
Partition partition(const Dataset& ds, double train_fraction, rng::Stream& stream);

/// Class-stratified variant, off by default in all pipelines; per-class
/// train counts use the same half-to-even rule.
Partition partition_stratified(const Dataset& ds, const std::string& factor_name,
                               double train_fraction, rng::Stream& stream);

/// Rows where `factor_name` equals `category_label`; the stratifying
/// factor is retained (now constant). Throws UnknownFactor /
/// UnknownCategory / EmptyStratum.
Dataset stratify(const Dataset& ds, const std::string& factor_name,
                 const std::string& category_label);

/// Converts the selected features (all features when `kind` is empty) to
/// per-sample relative values: each value divided by the row sum over the
/// selection. Throws ZeroRowSum naming the offending sample.
Dataset normalize_relative(const Dataset& ds, std::optional<FeatureKind> kind = {});

}  // namespace modkit
