#include "modkit/info_theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace modkit {

namespace {

double kahan_sum(const std::vector<double>& values) {
  double sum = 0.0, comp = 0.0;
  for (const double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

std::vector<std::size_t> resolve_axes(const JointPmf& p,
                                      const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  std::unordered_set<std::size_t> seen;
  for (const auto& n : names) {
    const std::size_t i = p.axis_index(n);
    if (!seen.insert(i).second) {
      raise(ErrorCode::OverlappingAxes, "axis '" + n + "' listed twice");
    }
    idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

void require_disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                      const JointPmf& p) {
  for (const auto i : a) {
    if (std::binary_search(b.begin(), b.end(), i)) {
      raise(ErrorCode::OverlappingAxes,
            "axis '" + p.axes()[i].name + "' appears in both sets");
    }
  }
}

std::vector<std::string> names_of(const JointPmf& p, const std::vector<std::size_t>& idx) {
  std::vector<std::string> names;
  names.reserve(idx.size());
  for (const auto i : idx) names.push_back(p.axes()[i].name);
  return names;
}

std::vector<std::string> union_names(const JointPmf& p, const std::vector<std::size_t>& a,
                                     const std::vector<std::size_t>& b) {
  std::vector<std::size_t> u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return names_of(p, u);
}

// entropy of a dense prob table, 0*log(0) == 0, compensated accumulation
double table_entropy_bits(const std::vector<double>& probs) {
  double sum = 0.0, comp = 0.0;
  for (const double pr : probs) {
    if (pr <= 0.0) continue;
    const double v = -pr * std::log2(pr);
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double entropy_indices(const JointPmf& p, const std::vector<std::size_t>& idx);

double conditional_entropy_indices(const JointPmf& p, const std::vector<std::size_t>& target,
                                   const std::vector<std::size_t>& given) {
  std::vector<std::size_t> joint;
  std::set_union(target.begin(), target.end(), given.begin(), given.end(),
                 std::back_inserter(joint));
  return entropy_indices(p, joint) - entropy_indices(p, given);
}

}  // namespace

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> probs, std::size_t cell_cap)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  std::size_t cells = 1;
  std::unordered_set<std::string> names;
  for (const auto& a : axes_) {
    if (a.name.empty()) raise(ErrorCode::InvalidPmf, "axis with empty name");
    if (!names.insert(a.name).second) {
      raise(ErrorCode::InvalidPmf, "duplicate axis name '" + a.name + "'");
    }
    if (a.cardinality < 1) {
      raise(ErrorCode::InvalidPmf, "axis '" + a.name + "' has cardinality 0");
    }
    if (cells > cell_cap / a.cardinality) {
      raise(ErrorCode::CellCapExceeded,
            "joint table exceeds the cell cap of " + std::to_string(cell_cap));
    }
    cells *= a.cardinality;
  }
  if (probs_.size() != cells) {
    raise(ErrorCode::InvalidPmf,
          "expected " + std::to_string(cells) + " probabilities, got " +
              std::to_string(probs_.size()));
  }
  for (const double pr : probs_) {
    if (!(pr >= 0.0) || !std::isfinite(pr)) {
      raise(ErrorCode::InvalidPmf, "probabilities must be finite and non-negative");
    }
  }
  const double total = kahan_sum(probs_);
  if (std::abs(total - 1.0) > 1e-12) {
    raise(ErrorCode::InvalidPmf,
          "probabilities sum to " + std::to_string(total) + ", expected 1");
  }
}

bool JointPmf::has_axis(const std::string& name) const noexcept {
  return std::any_of(axes_.begin(), axes_.end(),
                     [&](const auto& a) { return a.name == name; });
}

std::size_t JointPmf::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return i;
  }
  raise(ErrorCode::UnknownAxis, "no axis named '" + name + "'");
}

JointPmf JointPmf::marginal(const std::vector<std::string>& axis_names) const {
  std::vector<std::size_t> keep;
  {
    std::unordered_set<std::size_t> seen;
    for (const auto& n : axis_names) {
      const std::size_t i = axis_index(n);
      if (!seen.insert(i).second) {
        raise(ErrorCode::OverlappingAxes, "axis '" + n + "' listed twice");
      }
      keep.push_back(i);
    }
  }
  std::sort(keep.begin(), keep.end());

  std::vector<Axis> out_axes;
  out_axes.reserve(keep.size());
  std::size_t out_cells = 1;
  for (const auto i : keep) {
    out_axes.push_back(axes_[i]);
    out_cells *= axes_[i].cardinality;
  }

  // strides of the full table, last axis fastest
  std::vector<std::size_t> stride(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 1;) {
    stride[i - 1] = stride[i] * axes_[i].cardinality;
  }

  std::vector<double> out(out_cells, 0.0);
  std::vector<double> comp(out_cells, 0.0);
  for (std::size_t cell = 0; cell < probs_.size(); ++cell) {
    std::size_t out_idx = 0;
    for (const auto a : keep) {
      const std::size_t digit = (cell / stride[a]) % axes_[a].cardinality;
      out_idx = out_idx * axes_[a].cardinality + digit;
    }
    const double y = probs_[cell] - comp[out_idx];
    const double t = out[out_idx] + y;
    comp[out_idx] = (t - out[out_idx]) - y;
    out[out_idx] = t;
  }
  // skip re-validation: the mass is the same by construction
  JointPmf result;
  result.axes_ = std::move(out_axes);
  result.probs_ = std::move(out);
  return result;
}

namespace {

double entropy_indices(const JointPmf& p, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  const JointPmf marg = p.marginal(names_of(p, idx));
  return table_entropy_bits(marg.probs());
}

}  // namespace

double entropy(const JointPmf& p, const std::vector<std::string>& subset) {
  return entropy_indices(p, resolve_axes(p, subset));
}

double conditional_entropy(const JointPmf& p, const std::vector<std::string>& target,
                           const std::vector<std::string>& given) {
  const auto t = resolve_axes(p, target);
  const auto g = resolve_axes(p, given);
  require_disjoint(t, g, p);
  return conditional_entropy_indices(p, t, g);
}

double mutual_information(const JointPmf& p, const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) {
    raise(ErrorCode::EmptyAxisSet, "mutual information needs non-empty axis sets");
  }
  const auto ia = resolve_axes(p, a);
  const auto ib = resolve_axes(p, b);
  require_disjoint(ia, ib, p);
  const double mi = entropy_indices(p, ia) - conditional_entropy_indices(p, ia, ib);
  if (mi < -1e-9) {
    raise(ErrorCode::InternalError, "mutual information below rounding floor");
  }
  return std::max(0.0, mi);
}

double conditional_mutual_information(const JointPmf& p, const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& given) {
  if (a.empty() || b.empty()) {
    raise(ErrorCode::EmptyAxisSet, "conditional MI needs non-empty axis sets");
  }
  const auto ia = resolve_axes(p, a);
  const auto ib = resolve_axes(p, b);
  const auto ig = resolve_axes(p, given);
  require_disjoint(ia, ib, p);
  require_disjoint(ia, ig, p);
  require_disjoint(ib, ig, p);

  std::vector<std::size_t> gb;
  std::set_union(ig.begin(), ig.end(), ib.begin(), ib.end(), std::back_inserter(gb));
  const double cmi =
      conditional_entropy_indices(p, ia, ig) - conditional_entropy_indices(p, ia, gb);
  if (cmi < -1e-9) {
    raise(ErrorCode::InternalError, "conditional MI below rounding floor");
  }
  return std::max(0.0, cmi);
}

namespace {

// all non-empty subset masks, smallest subsets first, then low axes first
std::vector<std::uint32_t> subset_masks(std::size_t k) {
  std::vector<std::uint32_t> masks;
  masks.reserve((std::size_t{1} << k) - 1);
  for (std::uint32_t m = 1; m < (std::uint32_t{1} << k); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t x, std::uint32_t y) {
                     return std::popcount(x) < std::popcount(y);
                   });
  return masks;
}

template <typename MiFn>
ModulatorResult subset_search(const std::vector<std::string>& target_axes, double eps,
                              MiFn&& mi_of_subset) {
  if (target_axes.size() > kMaxSubsetSearchAxes) {
    raise(ErrorCode::SubsetSearchTooLarge,
          "subset search over " + std::to_string(target_axes.size()) +
              " axes exceeds the cap of " + std::to_string(kMaxSubsetSearchAxes));
  }
  if (target_axes.empty()) return {};
  for (const auto mask : subset_masks(target_axes.size())) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < target_axes.size(); ++i) {
      if (mask & (std::uint32_t{1} << i)) subset.push_back(target_axes[i]);
    }
    if (mi_of_subset(subset) > eps) return {true, subset};
  }
  return {};
}

}  // namespace

ModulatorResult find_modulator_witness(const JointPmf& p,
                                       const std::vector<std::string>& f_axes,
                                       const std::vector<std::string>& target_axes,
                                       double eps) {
  return subset_search(target_axes, eps, [&](const std::vector<std::string>& t) {
    return mutual_information(p, f_axes, t);
  });
}

bool is_modulator(const JointPmf& p, const std::vector<std::string>& f_axes,
                  const std::vector<std::string>& target_axes, double eps) {
  return find_modulator_witness(p, f_axes, target_axes, eps).detected;
}

ModulatorResult find_robust_modulator_witness(const JointPmf& p,
                                              const std::vector<std::string>& f1,
                                              const std::vector<std::string>& f2,
                                              const std::vector<std::string>& target_axes,
                                              double eps) {
  return subset_search(target_axes, eps, [&](const std::vector<std::string>& t) {
    return conditional_mutual_information(p, f1, t, f2);
  });
}

bool is_robust_modulator(const JointPmf& p, const std::vector<std::string>& f1,
                         const std::vector<std::string>& f2,
                         const std::vector<std::string>& target_axes, double eps) {
  return find_robust_modulator_witness(p, f1, f2, target_axes, eps).detected;
}

std::pair<std::vector<std::uint32_t>, std::size_t> equal_frequency_bins(
    const std::vector<double>& values, std::size_t bins) {
  const std::size_t n = values.size();
  std::pair<std::vector<std::uint32_t>, std::size_t> result{
      std::vector<std::uint32_t>(n, 0), 1};
  if (n == 0) return result;

  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  if (*min_it == *max_it) return result;  // constant column: single bin

  const std::size_t k = std::min(bins, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // stable by original index, so tied values bin deterministically
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t rank = 0; rank < n; ++rank) {
    result.first[order[rank]] = static_cast<std::uint32_t>(rank * k / n);
  }
  result.second = k;
  return result;
}

JointPmf empirical_joint(const Dataset& ds, const std::vector<std::string>& factor_names,
                         const std::vector<std::string>& feature_names, std::size_t bins,
                         std::size_t cell_cap) {
  if (!feature_names.empty() && bins < 2) {
    raise(ErrorCode::InvalidPmf, "need at least 2 bins for continuous features");
  }
  if (factor_names.empty() && feature_names.empty()) {
    raise(ErrorCode::EmptyAxisSet, "empirical joint needs at least one column");
  }

  const std::size_t n = ds.n_samples();
  std::vector<Axis> axes;
  std::vector<const std::vector<std::uint32_t>*> columns;
  std::vector<std::vector<std::uint32_t>> binned_storage;
  binned_storage.reserve(feature_names.size());

  for (const auto& name : factor_names) {
    const FactorColumn& f = ds.factor(name);
    axes.push_back({name, f.categories.size()});
  }
  for (const auto& name : feature_names) {
    const FeatureColumn& f = ds.feature(name);
    auto [assignment, n_bins] = equal_frequency_bins(f.values, bins);
    binned_storage.push_back(std::move(assignment));
    axes.push_back({name, n_bins});
  }

  std::size_t cells = 1;
  for (const auto& a : axes) {
    if (cells > cell_cap / a.cardinality) {
      raise(ErrorCode::CellCapExceeded,
            "empirical joint exceeds the cell cap of " + std::to_string(cell_cap));
    }
    cells *= a.cardinality;
  }

  for (const auto& name : factor_names) {
    columns.push_back(&ds.factor(name).values);
  }
  for (auto& b : binned_storage) columns.push_back(&b);

  std::vector<double> counts(cells, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      idx = idx * axes[a].cardinality + (*columns[a])[s];
    }
    counts[idx] += 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& c : counts) c *= inv_n;

  return JointPmf(std::move(axes), std::move(counts), cell_cap);
}

}  // namespace modkit
