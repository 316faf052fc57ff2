// The 615-feature time/frequency extraction. The layout function below is
// the single source of truth for both the manifest and the values, so the
// two cannot drift apart.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "hbc/errors.hpp"
#include "hbc/features.hpp"
#include "hbc/spectrum.hpp"
#include "hbc/stats.hpp"

namespace hbc {
namespace {

constexpr std::size_t kBandFft = 128;  // 64 positive-frequency bins
constexpr std::size_t kBands = 8;
constexpr std::size_t kBinsPerBand = 8;
constexpr std::size_t kArOrder = 4;
constexpr std::array<const char*, 3> kAxes = {"X", "Y", "Z"};

struct Signal {
  std::vector<double> t;         // time domain
  std::vector<double> spectrum;  // |DFT| bins 0..n/2
  std::array<double, kBands> bands{};
};

Signal make_signal(std::vector<double> x) {
  Signal s;
  s.spectrum = magnitude_spectrum(x);
  const auto padded = rfft(x, kBandFft);
  for (std::size_t b = 0; b < kBands; ++b) {
    double e = 0.0;
    for (std::size_t k = b * kBinsPerBand + 1; k <= (b + 1) * kBinsPerBand; ++k) e += std::norm(padded[k]);
    s.bands[b] = e / static_cast<double>(x.size());
  }
  s.t = std::move(x);
  return s;
}

using Signals = std::map<std::string, Signal, std::less<>>;

struct Group {
  const char* name;  // Acc, Gyro, Acc_Jerk, Gyro_Jerk
  Modality source;
};
constexpr std::array<Group, 4> kGroups = {Group{"Acc", Modality::kImu}, Group{"Gyro", Modality::kImu},
                                          Group{"Acc_Jerk", Modality::kImu}, Group{"Gyro_Jerk", Modality::kImu}};
constexpr std::array<Group, 6> kScalars = {Group{"Cap", Modality::kHbc},          Group{"Cap_Jerk", Modality::kHbc},
                                           Group{"Acc_Mag", Modality::kImu},      Group{"Gyro_Mag", Modality::kImu},
                                           Group{"Acc_Jerk_Mag", Modality::kImu}, Group{"Gyro_Jerk_Mag", Modality::kImu}};

Signals derive_signals(const Window& w, double fs) {
  Signals out;
  std::array<std::vector<double>, 3> acc, gyro, acc_j, gyro_j;
  static constexpr std::array<std::string_view, 3> kAccCh = {channel::kAccX, channel::kAccY, channel::kAccZ};
  static constexpr std::array<std::string_view, 3> kGyroCh = {channel::kGyroX, channel::kGyroY, channel::kGyroZ};
  for (int a = 0; a < 3; ++a) {
    acc[a] = w.channel(kAccCh[a]);
    gyro[a] = w.channel(kGyroCh[a]);
    acc_j[a] = jerk(acc[a], fs);
    gyro_j[a] = jerk(gyro[a], fs);
  }
  const auto& cap = w.channel(channel::kCap);
  for (int a = 0; a < 3; ++a) {
    out.emplace(std::string("Acc_") + kAxes[a], make_signal(acc[a]));
    out.emplace(std::string("Gyro_") + kAxes[a], make_signal(gyro[a]));
    out.emplace(std::string("Acc_Jerk_") + kAxes[a], make_signal(acc_j[a]));
    out.emplace(std::string("Gyro_Jerk_") + kAxes[a], make_signal(gyro_j[a]));
  }
  out.emplace("Cap", make_signal(cap));
  out.emplace("Cap_Jerk", make_signal(jerk(cap, fs)));
  out.emplace("Acc_Mag", make_signal(magnitude(acc[0], acc[1], acc[2])));
  out.emplace("Gyro_Mag", make_signal(magnitude(gyro[0], gyro[1], gyro[2])));
  out.emplace("Acc_Jerk_Mag", make_signal(magnitude(acc_j[0], acc_j[1], acc_j[2])));
  out.emplace("Gyro_Jerk_Mag", make_signal(magnitude(gyro_j[0], gyro_j[1], gyro_j[2])));
  return out;
}

double mean_frequency_index(std::span<const double> s) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    num += static_cast<double>(k) * s[k];
    den += s[k];
  }
  return den > 0.0 ? num / den : 0.0;
}

double power_entropy(std::span<const double> s) {
  std::vector<double> p(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) p[k] = s[k] * s[k];
  return stats::shannon_entropy(p);
}

double group_sma(const std::array<const std::vector<double>*, 3>& xyz) {
  double acc = 0.0;
  const std::size_t n = xyz[0]->size();
  for (std::size_t i = 0; i < n; ++i) acc += std::abs((*xyz[0])[i]) + std::abs((*xyz[1])[i]) + std::abs((*xyz[2])[i]);
  return acc / static_cast<double>(n);
}

// Sink signature: (name, formula, source, value thunk). The manifest sink
// never evaluates the thunk, so `sig` may be null there.
using Sink = std::function<void(std::string, std::string, Modality, const std::function<double()>&)>;

void time_stats(const Sink& sink, const Signals* sig, const std::string& name, Modality src, bool scalar) {
  const std::string p = "t_" + name + "_";
  auto x = [sig, name]() -> const std::vector<double>& { return sig->at(name).t; };
  auto f = [sig, name]() -> const std::vector<double>& { return sig->at(name).spectrum; };
  sink(p + "mean", "mean(t:" + name + ")", src, [&] { return stats::mean(x()); });
  sink(p + "std", "std(t:" + name + ")", src, [&] { return stats::stddev(x()); });
  sink(p + "mad", "mad(t:" + name + ")", src, [&] { return stats::mad(x()); });
  sink(p + "max", "max(t:" + name + ")", src, [&] { return stats::max(x()); });
  sink(p + "min", "min(t:" + name + ")", src, [&] { return stats::min(x()); });
  if (scalar) sink(p + "sma", "mean_abs(t:" + name + ")", src, [&] { return stats::sma(x()); });
  sink(p + "energy", "sumsq_over_n(t:" + name + ")", src, [&] { return stats::energy(x()); });
  sink(p + "iqr", "iqr(t:" + name + ")", src, [&] { return stats::iqr(x()); });
  sink(p + "entropy", "shannon(normalized |dft|(t:" + name + "))", src,
       [&] { return stats::shannon_entropy(f()); });
  for (std::size_t k = 0; k < kArOrder; ++k) {
    sink(p + "arCoeff" + std::to_string(k + 1), "burg_ar4[" + std::to_string(k + 1) + "](t:" + name + ")", src,
         [&, k] { return stats::burg_ar(x(), kArOrder)[k]; });
  }
}

void freq_stats(const Sink& sink, const Signals* sig, const std::string& name, Modality src, bool scalar) {
  const std::string p = "f_" + name + "_";
  auto s = [sig, name]() -> const std::vector<double>& { return sig->at(name).spectrum; };
  sink(p + "mean", "mean(f:" + name + ")", src, [&] { return stats::mean(s()); });
  sink(p + "std", "std(f:" + name + ")", src, [&] { return stats::stddev(s()); });
  sink(p + "mad", "mad(f:" + name + ")", src, [&] { return stats::mad(s()); });
  sink(p + "max", "max(f:" + name + ")", src, [&] { return stats::max(s()); });
  sink(p + "min", "min(f:" + name + ")", src, [&] { return stats::min(s()); });
  if (scalar) sink(p + "sma", "mean_abs(f:" + name + ")", src, [&] { return stats::sma(s()); });
  sink(p + "energy", "sumsq_over_n(f:" + name + ")", src, [&] { return stats::energy(s()); });
  sink(p + "iqr", "iqr(f:" + name + ")", src, [&] { return stats::iqr(s()); });
  sink(p + "entropy", "shannon(normalized |dft|^2(t:" + name + "))", src, [&] { return power_entropy(s()); });
  sink(p + "maxInds", "argmax_bin(f:" + name + ")", src,
       [&] { return static_cast<double>(stats::argmax(s())); });
  sink(p + "meanFreq", "weighted_mean_bin(f:" + name + ")", src, [&] { return mean_frequency_index(s()); });
  sink(p + "skewness", "skewness(f:" + name + ")", src, [&] { return stats::skewness(s()); });
  sink(p + "kurtosis", "excess_kurtosis(f:" + name + ")", src, [&] { return stats::kurtosis(s()); });
  for (std::size_t b = 0; b < kBands; ++b) {
    const std::size_t lo = b * kBinsPerBand + 1;
    const std::size_t hi = (b + 1) * kBinsPerBand;
    sink(p + "bandsEnergy" + std::to_string(b + 1),
         "band_power(dft128(t:" + name + "), bins " + std::to_string(lo) + "-" + std::to_string(hi) + ")", src,
         [&, b] { return sig->at(name).bands[b]; });
  }
}

void gym_layout(const Sink& sink, const Signals* sig) {
  // Time domain: 4 groups x (3 axes x 12 + 4) + 6 scalars x 13 = 238.
  for (const Group& g : kGroups) {
    const std::string base = g.name;
    for (const char* ax : kAxes) time_stats(sink, sig, base + "_" + ax, g.source, false);
    sink("t_" + base + "_sma", "mean(|x|+|y|+|z|)(t:" + base + ")", g.source, [&] {
      return group_sma({&sig->at(base + "_X").t, &sig->at(base + "_Y").t, &sig->at(base + "_Z").t});
    });
    static constexpr std::array<std::array<int, 2>, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};
    for (const auto& pr : kPairs) {
      const std::string a = base + "_" + kAxes[pr[0]];
      const std::string b = base + "_" + kAxes[pr[1]];
      sink("t_" + base + "_correlation" + kAxes[pr[0]] + kAxes[pr[1]], "pearson(t:" + a + ", t:" + b + ")",
           g.source, [&] { return stats::correlation(sig->at(a).t, sig->at(b).t); });
    }
  }
  for (const Group& g : kScalars) time_stats(sink, sig, g.name, g.source, true);

  // Frequency domain: 4 groups x (3 axes x 20 + 1) + 6 scalars x 21 = 370.
  for (const Group& g : kGroups) {
    const std::string base = g.name;
    for (const char* ax : kAxes) freq_stats(sink, sig, base + "_" + ax, g.source, false);
    sink("f_" + base + "_sma", "mean(|x|+|y|+|z|)(f:" + base + ")", g.source, [&] {
      return group_sma(
          {&sig->at(base + "_X").spectrum, &sig->at(base + "_Y").spectrum, &sig->at(base + "_Z").spectrum});
    });
  }
  for (const Group& g : kScalars) freq_stats(sink, sig, g.name, g.source, true);

  // Cross-sensor correlations: 7.
  static constexpr std::array<const char*, 6> kImuAxes = {"Acc_X", "Acc_Y", "Acc_Z", "Gyro_X", "Gyro_Y", "Gyro_Z"};
  for (const char* other : kImuAxes) {
    const std::string o = other;
    sink("t_correlation_Cap_" + o, "pearson(t:Cap, t:" + o + ")", Modality::kBoth,
         [&] { return stats::correlation(sig->at("Cap").t, sig->at(o).t); });
  }
  sink("t_correlation_Acc_Mag_Gyro_Mag", "pearson(t:Acc_Mag, t:Gyro_Mag)", Modality::kImu,
       [&] { return stats::correlation(sig->at("Acc_Mag").t, sig->at("Gyro_Mag").t); });
}

}  // namespace

ManifestPtr gym_manifest() {
  static const ManifestPtr m = [] {
    std::vector<FeatureSpec> specs;
    gym_layout(
        [&](std::string name, std::string formula, Modality src, const std::function<double()>&) {
          specs.push_back({std::move(name), std::move(formula), src});
        },
        nullptr);
    if (specs.size() != kGymFeatureCount)
      throw SchemaError("gym manifest has " + std::to_string(specs.size()) + " features, expected 615");
    return std::make_shared<const FeatureManifest>("gym-615-v1", std::move(specs));
  }();
  return m;
}

FeatureVector extract_features_gym(const Window& w, double fs) {
  if (w.length_samples < 2) throw DomainError("gym features need at least two samples");
  const Signals sig = derive_signals(w, fs);
  FeatureVector fv;
  fv.manifest = gym_manifest();
  fv.label = w.label;
  fv.weight = w.weight;
  fv.session_id = w.session_id;
  fv.window_start = w.start_index;
  fv.values.reserve(kGymFeatureCount);
  gym_layout([&](std::string, std::string, Modality,
                 const std::function<double()>& value) { fv.values.push_back(value()); },
             &sig);
  return fv;
}

}  // namespace hbc
