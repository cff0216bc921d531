#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "modkit/data_model.hpp"

namespace modkit {

struct Axis {
  std::string name;
  std::size_t cardinality = 0;
};

/// Exact finite joint distribution over a small set of discrete variables.
/// Probabilities are stored densely in row-major order with the last axis
/// varying fastest. All information quantities below are computed from
/// this table directly (no estimation), in bits.
class JointPmf {
 public:
  static constexpr std::size_t kDefaultCellCap = 1000000;

  JointPmf(std::vector<Axis> axes, std::vector<double> probs,
           std::size_t cell_cap = kDefaultCellCap);

  const std::vector<Axis>& axes() const noexcept { return axes_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t n_cells() const noexcept { return probs_.size(); }

  bool has_axis(const std::string& name) const noexcept;
  std::size_t axis_index(const std::string& name) const;  // UnknownAxis

  /// Marginal over the named axes; result axes follow this pmf's axis
  /// order regardless of the order given.
  JointPmf marginal(const std::vector<std::string>& axis_names) const;

 private:
  JointPmf() = default;

  std::vector<Axis> axes_;
  std::vector<double> probs_;
};

/// H(subset) in bits, with 0*log(0) == 0. An empty subset has entropy 0.
double entropy(const JointPmf& p, const std::vector<std::string>& subset);

/// H(target | given) = H(target u given) - H(given). Axis sets must be
/// disjoint.
double conditional_entropy(const JointPmf& p, const std::vector<std::string>& target,
                           const std::vector<std::string>& given);

/// I(a; b) = H(a) - H(a | b), clamped at 0 from below. Symmetric in
/// (a, b) up to rounding.
double mutual_information(const JointPmf& p, const std::vector<std::string>& a,
                          const std::vector<std::string>& b);

/// I(a; b | given) = H(a | given) - H(a | given u b), clamped at 0.
double conditional_mutual_information(const JointPmf& p,
                                      const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& given);

/// Subset search cap for the modulator checks: 2^|target_axes| candidate
/// subsets get enumerated, so |target_axes| is limited.
inline constexpr std::size_t kMaxSubsetSearchAxes = 12;

struct ModulatorResult {
  bool detected = false;
  /// Smallest witnessing subset (ties: earliest in axis order); empty when
  /// not detected.
  std::vector<std::string> witness;
};

/// True iff some non-empty subset T of target_axes has I(f_axes; T) > eps.
/// The search is exhaustive over subsets, smallest first.
ModulatorResult find_modulator_witness(const JointPmf& p,
                                       const std::vector<std::string>& f_axes,
                                       const std::vector<std::string>& target_axes,
                                       double eps);
bool is_modulator(const JointPmf& p, const std::vector<std::string>& f_axes,
                  const std::vector<std::string>& target_axes, double eps);

/// Same search with I(f1; T | f2) > eps: modulation that survives
/// conditioning on a second factor set.
ModulatorResult find_robust_modulator_witness(const JointPmf& p,
                                              const std::vector<std::string>& f1,
                                              const std::vector<std::string>& f2,
                                              const std::vector<std::string>& target_axes,
                                              double eps);
bool is_robust_modulator(const JointPmf& p, const std::vector<std::string>& f1,
                         const std::vector<std::string>& f2,
                         const std::vector<std::string>& target_axes, double eps);

/// Plugin (normalized-count) joint over the named columns. Factors are
/// used as-is; each feature is discretized into equal-frequency bins
/// (rank order, ties by sample order, at most `bins` bins). A constant
/// feature becomes a single-bin axis rather than an error, so its MI
/// contribution is exactly zero.
JointPmf empirical_joint(const Dataset& ds, const std::vector<std::string>& factor_names,
                         const std::vector<std::string>& feature_names, std::size_t bins,
                         std::size_t cell_cap = JointPmf::kDefaultCellCap);

/// Rank-based equal-frequency bin assignment used by empirical_joint;
/// exposed for reuse and tests. Returns (assignment, n_bins).
std::pair<std::vector<std::uint32_t>, std::size_t> equal_frequency_bins(
    const std::vector<double>& values, std::size_t bins);

}  // namespace modkit
