#include "modkit/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace modkit {

namespace {

// round-half-to-even, independent of the FP environment
std::size_t round_half_even(double x) {
  const double floor_x = std::floor(x);
  const double frac = x - floor_x;
  if (frac > 0.5) return static_cast<std::size_t>(floor_x) + 1;
  if (frac < 0.5) return static_cast<std::size_t>(floor_x);
  const auto lo = static_cast<std::size_t>(floor_x);
  return (lo % 2 == 0) ? lo : lo + 1;
}

void validate_factor(const FactorColumn& f, std::size_t n_samples) {
  if (f.categories.empty()) {
    raise(ErrorCode::InvalidDataset, "factor '" + f.name + "' has no categories");
  }
  std::unordered_set<std::string> seen;
  for (const auto& c : f.categories) {
    if (!seen.insert(c).second) {
      raise(ErrorCode::InvalidDataset,
            "factor '" + f.name + "' has duplicate category '" + c + "'");
    }
  }
  if (f.values.size() != n_samples) {
    raise(ErrorCode::InvalidDataset, "factor '" + f.name + "' length mismatch");
  }
  for (const auto v : f.values) {
    if (v >= f.categories.size()) {
      raise(ErrorCode::InvalidDataset,
            "factor '" + f.name + "' has out-of-range category id");
    }
  }
}

void validate_feature(const FeatureColumn& f, std::size_t n_samples) {
  if (f.values.size() != n_samples) {
    raise(ErrorCode::InvalidDataset, "feature '" + f.name + "' length mismatch");
  }
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double v = f.values[i];
    if (std::isnan(v)) {
      raise(ErrorCode::MissingValue,
            "feature '" + f.name + "' sample " + std::to_string(i) + " is NaN");
    }
    if (!std::isfinite(v)) {
      raise(ErrorCode::InvalidDataset,
            "feature '" + f.name + "' sample " + std::to_string(i) + " is not finite");
    }
    if (v < 0.0) {
      raise(ErrorCode::NegativeFeature,
            "feature '" + f.name + "' sample " + std::to_string(i) + " is negative");
    }
  }
}

}  // namespace

std::size_t FactorColumn::n_categories_present() const {
  std::set<std::uint32_t> present(values.begin(), values.end());
  return present.size();
}

const char* feature_kind_name(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::BacterialAbundance: return "bacterial_abundance";
    case FeatureKind::SerumMetabolite: return "serum_metabolite";
    case FeatureKind::ColonMetabolite: return "colon_metabolite";
    case FeatureKind::Generic: return "generic";
  }
  return "generic";
}

std::optional<FeatureKind> feature_kind_from_name(const std::string& name) noexcept {
  if (name == "bacterial_abundance") return FeatureKind::BacterialAbundance;
  if (name == "serum_metabolite") return FeatureKind::SerumMetabolite;
  if (name == "colon_metabolite") return FeatureKind::ColonMetabolite;
  if (name == "generic") return FeatureKind::Generic;
  return std::nullopt;
}

Dataset::Dataset(std::vector<FactorColumn> factors, std::vector<FeatureColumn> features,
                 std::string provenance)
    : factors_(std::move(factors)),
      features_(std::move(features)),
      provenance_(std::move(provenance)) {
  std::size_t n = 0;
  if (!factors_.empty()) {
    n = factors_.front().values.size();
  } else if (!features_.empty()) {
    n = features_.front().values.size();
  }
  if (n == 0) {
    raise(ErrorCode::InvalidDataset, "dataset must contain at least one sample");
  }
  n_samples_ = n;

  std::unordered_set<std::string> names;
  for (const auto& f : factors_) {
    validate_factor(f, n_samples_);
    if (!names.insert(f.name).second) {
      raise(ErrorCode::InvalidDataset, "duplicate column name '" + f.name + "'");
    }
  }
  for (const auto& f : features_) {
    validate_feature(f, n_samples_);
    if (!names.insert(f.name).second) {
      raise(ErrorCode::InvalidDataset, "duplicate column name '" + f.name + "'");
    }
  }
}

bool Dataset::has_factor(const std::string& name) const noexcept {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const auto& f) { return f.name == name; });
}

bool Dataset::has_feature(const std::string& name) const noexcept {
  return std::any_of(features_.begin(), features_.end(),
                     [&](const auto& f) { return f.name == name; });
}

std::size_t Dataset::factor_index(const std::string& name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].name == name) return i;
  }
  raise(ErrorCode::UnknownFactor, "no factor named '" + name + "'");
}

std::size_t Dataset::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  raise(ErrorCode::UnknownFeature, "no feature named '" + name + "'");
}

const FactorColumn& Dataset::factor(const std::string& name) const {
  return factors_[factor_index(name)];
}

const FeatureColumn& Dataset::feature(const std::string& name) const {
  return features_[feature_index(name)];
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(features_.size());
  for (const auto& f : features_) names.push_back(f.name);
  return names;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
  if (rows.empty()) {
    raise(ErrorCode::EmptyStratum, "row selection is empty");
  }
  for (const auto r : rows) {
    if (r >= n_samples_) {
      raise(ErrorCode::InvalidDataset, "row index out of range");
    }
  }
  std::vector<FactorColumn> factors = factors_;
  for (auto& f : factors) {
    std::vector<std::uint32_t> values;
    values.reserve(rows.size());
    for (const auto r : rows) values.push_back(f.values[r]);
    f.values = std::move(values);
  }
  std::vector<FeatureColumn> features = features_;
  for (auto& f : features) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto r : rows) values.push_back(f.values[r]);
    f.values = std::move(values);
  }
  return Dataset(std::move(factors), std::move(features), provenance_);
}

Partition partition(const Dataset& ds, double train_fraction, rng::Stream& stream) {
  const std::size_t n = ds.n_samples();
  if (n < 2) {
    raise(ErrorCode::DegenerateSplit, "need at least 2 samples to split");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    raise(ErrorCode::DegenerateSplit, "train fraction must lie in (0, 1)");
  }
  const std::size_t n_train = round_half_even(static_cast<double>(n) * train_fraction);
  if (n_train < 1 || n_train > n - 1) {
    raise(ErrorCode::DegenerateSplit,
          "train size " + std::to_string(n_train) + " of " + std::to_string(n) +
              " leaves one side empty");
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  stream.shuffle(perm);

  Partition p;
  p.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  p.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(p.train_indices.begin(), p.train_indices.end());
  std::sort(p.test_indices.begin(), p.test_indices.end());
  return p;
}

Partition partition_stratified(const Dataset& ds, const std::string& factor_name,
                               double train_fraction, rng::Stream& stream) {
  const std::size_t n = ds.n_samples();
  if (n < 2) {
    raise(ErrorCode::DegenerateSplit, "need at least 2 samples to split");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    raise(ErrorCode::DegenerateSplit, "train fraction must lie in (0, 1)");
  }
  const FactorColumn& fac = ds.factor(factor_name);

  std::vector<std::vector<std::size_t>> by_class(fac.categories.size());
  for (std::size_t i = 0; i < n; ++i) by_class[fac.values[i]].push_back(i);

  Partition p;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    stream.shuffle(members);
    std::size_t k = round_half_even(static_cast<double>(members.size()) * train_fraction);
    k = std::min(k, members.size());
    p.train_indices.insert(p.train_indices.end(), members.begin(),
                           members.begin() + static_cast<std::ptrdiff_t>(k));
    p.test_indices.insert(p.test_indices.end(),
                          members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  if (p.train_indices.empty() || p.test_indices.empty()) {
    raise(ErrorCode::DegenerateSplit, "stratified split leaves one side empty");
  }
  std::sort(p.train_indices.begin(), p.train_indices.end());
  std::sort(p.test_indices.begin(), p.test_indices.end());
  return p;
}

Dataset stratify(const Dataset& ds, const std::string& factor_name,
                 const std::string& category_label) {
  const FactorColumn& fac = ds.factor(factor_name);
  const auto it = std::find(fac.categories.begin(), fac.categories.end(), category_label);
  if (it == fac.categories.end()) {
    raise(ErrorCode::UnknownCategory,
          "factor '" + factor_name + "' has no category '" + category_label + "'");
  }
  const auto id = static_cast<std::uint32_t>(it - fac.categories.begin());

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < ds.n_samples(); ++i) {
    if (fac.values[i] == id) rows.push_back(i);
  }
  if (rows.empty()) {
    raise(ErrorCode::EmptyStratum,
          "no samples with " + factor_name + " = " + category_label);
  }
  return ds.select_rows(rows);
}

Dataset normalize_relative(const Dataset& ds, std::optional<FeatureKind> kind) {
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < ds.features().size(); ++i) {
    if (!kind || ds.features()[i].kind == *kind) selected.push_back(i);
  }
  if (selected.empty()) {
    raise(ErrorCode::NoFeatures, "no features match the kind filter");
  }

  std::vector<FeatureColumn> features = ds.features();
  for (std::size_t s = 0; s < ds.n_samples(); ++s) {
    double row_sum = 0.0;
    for (const auto f : selected) row_sum += features[f].values[s];
    if (!(row_sum > 0.0)) {
      raise(ErrorCode::ZeroRowSum,
            "selected features sum to zero at sample " + std::to_string(s));
    }
    for (const auto f : selected) features[f].values[s] /= row_sum;
  }
  return Dataset(ds.factors(), std::move(features), ds.provenance());
}

}  // namespace modkit
