#include "modkit/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "modkit/rng.hpp"

namespace modkit {

namespace {

// 20-point Gauss-Legendre nodes (positive half) and weights
constexpr double kGlNodes[10] = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
    0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
    0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
    0.9931285991850949,
};
constexpr double kGlWeights[10] = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
    0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
    0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
    0.0176140071391521,
};

template <typename Fn>
double integrate(Fn&& fn, double lo, double hi, double panel_width) {
  const auto n_panels =
      static_cast<std::size_t>(std::ceil((hi - lo) / panel_width));
  double sum = 0.0;
  for (std::size_t p = 0; p < n_panels; ++p) {
    const double a = lo + (hi - lo) * static_cast<double>(p) / static_cast<double>(n_panels);
    const double b = lo + (hi - lo) * static_cast<double>(p + 1) / static_cast<double>(n_panels);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double panel = 0.0;
    for (int i = 0; i < 10; ++i) {
      panel += kGlWeights[i] * (fn(mid + half * kGlNodes[i]) + fn(mid - half * kGlNodes[i]));
    }
    sum += half * panel;
  }
  return sum;
}

double normal_pdf(double y, double mean, double sd) {
  static const double kInvSqrt2Pi = 0.3989422804014327;
  const double z = (y - mean) / sd;
  return kInvSqrt2Pi / sd * std::exp(-0.5 * z * z);
}

void pad_name(std::string& name, std::size_t index, std::size_t total) {
  std::size_t width = 1;
  for (std::size_t t = total; t >= 10; t /= 10) width++;
  std::string digits = std::to_string(index);
  name.append(width - digits.size(), '0');
  name += digits;
}

std::string noise_name(std::size_t index, std::size_t total) {
  std::string name = "noise_";
  pad_name(name, index + 1, total);
  return name;
}

constexpr const char* kCategories[2] = {"neg", "pos"};

FactorColumn make_factor(std::string name, std::vector<std::uint32_t> values,
                         bool feasible = false) {
  FactorColumn f;
  f.name = std::move(name);
  f.values = std::move(values);
  f.categories = {kCategories[0], kCategories[1]};
  f.feasible = feasible;
  return f;
}

std::vector<std::uint32_t> draw_bernoulli(std::size_t n, double p, rng::Stream stream) {
  std::vector<std::uint32_t> values(n);
  for (auto& v : values) v = stream.bernoulli(p) ? 1 : 0;
  return values;
}

FeatureColumn lognormal_column(std::string name, std::size_t n, double sd,
                               rng::Stream stream) {
  FeatureColumn f;
  f.name = std::move(name);
  f.values.resize(n);
  for (auto& v : f.values) v = stream.lognormal(0.0, sd);
  return f;
}

FeatureColumn shifted_column(std::string name, const std::vector<std::uint32_t>& labels,
                             double shift, double sd, rng::Stream stream) {
  FeatureColumn f;
  f.name = std::move(name);
  f.values.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    f.values[i] = stream.lognormal(labels[i] ? shift : 0.0, sd);
  }
  return f;
}

// Disjoint class supports: exp(sd * z) with z in [-4, 4] for class 0 and
// z in [5, 13] for class 1. The gap makes any mid-gap threshold a perfect
// separator, so Bayes accuracy 1 and binned recovery are exact.
constexpr double kDisjointGap = 9.0;

FeatureColumn disjoint_column(std::string name, const std::vector<std::uint32_t>& labels,
                              double sd, rng::Stream stream) {
  FeatureColumn f;
  f.name = std::move(name);
  f.values.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double z = stream.truncated_normal(-4.0, 4.0);
    f.values[i] = std::exp(sd * (z + (labels[i] ? kDisjointGap : 0.0)));
  }
  return f;
}

void append_noise(std::vector<FeatureColumn>& features, const ScenarioSpec& spec,
                  std::size_t first_stream_index) {
  for (std::size_t j = 0; j < spec.n_noise_features; ++j) {
    features.push_back(lognormal_column(
        noise_name(j, spec.n_noise_features), spec.n_samples, spec.noise_sd,
        rng::Stream::derive(spec.seed,
                            {rng::salt::kScenarioFeature, first_stream_index + j})));
  }
}

void validate(const ScenarioSpec& spec) {
  if (spec.n_samples < 4) {
    raise(ErrorCode::InvalidSpec, "need at least 4 samples");
  }
  if (!(spec.noise_sd > 0.0)) {
    raise(ErrorCode::InvalidSpec, "noise sd must be positive");
  }
  if (!(spec.class_balance > 0.0 && spec.class_balance < 1.0)) {
    raise(ErrorCode::InvalidSpec, "class balance must lie in (0, 1)");
  }
  if (spec.effect_size < 0.0) {
    raise(ErrorCode::InvalidSpec, "effect size must be non-negative");
  }
  switch (spec.kind) {
    case ScenarioKind::Independent:
      if (spec.n_noise_features < 1) {
        raise(ErrorCode::InvalidSpec, "Independent needs at least one noise feature");
      }
      break;
    case ScenarioKind::MarkovChain:
      if (!(spec.channel_flip >= 0.0 && spec.channel_flip <= 0.5)) {
        raise(ErrorCode::InvalidSpec, "channel flip must lie in [0, 0.5]");
      }
      break;
    case ScenarioKind::CurseOfDim:
      if (!(spec.effect_size > 0.0)) {
        raise(ErrorCode::InvalidSpec, "CurseOfDim needs a positive effect size");
      }
      break;
    default:
      break;
  }
}

}  // namespace

const char* scenario_kind_name(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Independent: return "independent";
    case ScenarioKind::DirectModulation: return "direct_modulation";
    case ScenarioKind::MarkovChain: return "markov_chain";
    case ScenarioKind::XorPair: return "xor_pair";
    case ScenarioKind::Separable: return "separable";
    case ScenarioKind::CurseOfDim: return "curse_of_dim";
  }
  return "independent";
}

std::optional<ScenarioKind> scenario_kind_from_name(const std::string& name) noexcept {
  if (name == "independent") return ScenarioKind::Independent;
  if (name == "direct_modulation") return ScenarioKind::DirectModulation;
  if (name == "markov_chain") return ScenarioKind::MarkovChain;
  if (name == "xor_pair") return ScenarioKind::XorPair;
  if (name == "separable") return ScenarioKind::Separable;
  if (name == "curse_of_dim") return ScenarioKind::CurseOfDim;
  return std::nullopt;
}

double binary_entropy_bits(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double gaussian_mixture_mi_bits(const std::vector<double>& class_priors,
                                const std::vector<std::vector<double>>& component_weights,
                                const std::vector<double>& component_means, double sd) {
  if (class_priors.empty() || component_means.empty() ||
      component_weights.size() != class_priors.size() || !(sd > 0.0)) {
    raise(ErrorCode::InvalidSpec, "malformed mixture description");
  }
  const double lo = *std::min_element(component_means.begin(), component_means.end()) -
                    12.0 * sd;
  const double hi = *std::max_element(component_means.begin(), component_means.end()) +
                    12.0 * sd;

  auto integrand = [&](double y) {
    double total = 0.0;
    std::vector<double> class_density(class_priors.size(), 0.0);
    for (std::size_t a = 0; a < class_priors.size(); ++a) {
      double fa = 0.0;
      for (std::size_t j = 0; j < component_means.size(); ++j) {
        fa += component_weights[a][j] * normal_pdf(y, component_means[j], sd);
      }
      class_density[a] = fa;
      total += class_priors[a] * fa;
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < class_priors.size(); ++a) {
      if (class_density[a] > 0.0 && total > 0.0) {
        sum += class_priors[a] * class_density[a] * std::log2(class_density[a] / total);
      }
    }
    return sum;
  };

  const double mi = integrate(integrand, lo, hi, sd / 2.0);
  return std::max(0.0, mi);
}

std::pair<Dataset, GroundTruth> generate(const ScenarioSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n_samples;
  const double sd = spec.noise_sd;
  const double shift = spec.effect_size * sd;

  std::vector<FactorColumn> factors;
  std::vector<FeatureColumn> features;
  GroundTruth truth;
  truth.kind = spec.kind;

  const auto labels = draw_bernoulli(
      n, spec.class_balance, rng::Stream::derive(spec.seed, {rng::salt::kScenarioFactor, 0}));

  switch (spec.kind) {
    case ScenarioKind::Independent: {
      factors.push_back(make_factor("label", labels));
      append_noise(features, spec, 0);
      truth.mi_bits = 0.0;
      break;
    }
    case ScenarioKind::DirectModulation: {
      factors.push_back(make_factor("label", labels, true));
      features.push_back(shifted_column(
          "signal", labels, shift, sd,
          rng::Stream::derive(spec.seed, {rng::salt::kScenarioFeature, 1000})));
      append_noise(features, spec, 0);
      truth.mi_bits = gaussian_mixture_mi_bits(
          {1.0 - spec.class_balance, spec.class_balance}, {{1.0, 0.0}, {0.0, 1.0}},
          {0.0, shift}, sd);
      truth.informative_features = {"signal"};
      break;
    }
    case ScenarioKind::MarkovChain: {
      const auto flips = draw_bernoulli(
          n, spec.channel_flip,
          rng::Stream::derive(spec.seed, {rng::salt::kScenarioFactor, 1}));
      std::vector<std::uint32_t> f2(n);
      for (std::size_t i = 0; i < n; ++i) f2[i] = labels[i] ^ flips[i];
      factors.push_back(make_factor("f1", labels, true));
      factors.push_back(make_factor("f2", f2));
      features.push_back(shifted_column(
          "signal", f2, shift, sd,
          rng::Stream::derive(spec.seed, {rng::salt::kScenarioFeature, 1000})));
      append_noise(features, spec, 0);
      const double p = spec.channel_flip;
      truth.cmi_bits = 0.0;  // f1 -> f2 -> signal by construction
      truth.mi_bits = gaussian_mixture_mi_bits(
          {1.0 - spec.class_balance, spec.class_balance},
          {{1.0 - p, p}, {p, 1.0 - p}}, {0.0, shift}, sd);
      truth.informative_features = {"signal"};
      break;
    }
    case ScenarioKind::XorPair: {
      const auto b1 = draw_bernoulli(
          n, 0.5, rng::Stream::derive(spec.seed, {rng::salt::kScenarioFactor, 1}));
      std::vector<std::uint32_t> b2(n);
      for (std::size_t i = 0; i < n; ++i) b2[i] = b1[i] ^ labels[i];
      factors.push_back(make_factor("label", labels));
      features.push_back(disjoint_column(
          "xor_a", b1, sd,
          rng::Stream::derive(spec.seed, {rng::salt::kScenarioFeature, 1000})));
      features.push_back(disjoint_column(
          "xor_b", b2, sd,
          rng::Stream::derive(spec.seed, {rng::salt::kScenarioFeature, 1001})));
      append_noise(features, spec, 0);
      truth.mi_bits = binary_entropy_bits(spec.class_balance);
      truth.singleton_mi_bits = 0.0;
      truth.informative_features = {"xor_a", "xor_b"};
      break;
    }
    case ScenarioKind::Separable: {
      factors.push_back(make_factor("label", labels, true));
      features.push_back(disjoint_column(
          "signal", labels, sd,
          rng::Stream::derive(spec.seed, {rng::salt::kScenarioFeature, 1000})));
      append_noise(features, spec, 0);
      truth.mi_bits = binary_entropy_bits(spec.class_balance);
      truth.bayes_accuracy = 1.0;
      truth.informative_features = {"signal"};
      break;
    }
    case ScenarioKind::CurseOfDim: {
      factors.push_back(make_factor("label", labels, true));
      // staggered effect strengths keep the informative features
      // complementary rather than four copies of one separator
      const double weights[4] = {1.0, 0.9, 0.8, 0.7};
      for (std::size_t k = 0; k < 4; ++k) {
        features.push_back(shifted_column(
            "signal_" + std::to_string(k + 1), labels, shift * weights[k], sd,
            rng::Stream::derive(spec.seed, {rng::salt::kScenarioFeature, 1000 + k})));
      }
      append_noise(features, spec, 0);
      truth.informative_features = {"signal_1", "signal_2", "signal_3", "signal_4"};
      break;
    }
  }

  Dataset ds(std::move(factors), std::move(features),
             std::string("synthgen:") + scenario_kind_name(spec.kind) +
                 ":seed=" + std::to_string(spec.seed));
  return {std::move(ds), std::move(truth)};
}

}  // namespace modkit
