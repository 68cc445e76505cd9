#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacvi/hetero_regressor.hpp"
#include "pacvi/types.hpp"

namespace pacvi {

enum class NoiseProfile { kHomoscedastic, kHeteroscedastic, kImbalancedVa };
enum class Predictor { kTrained, kOracle };
enum class Method { kPac, kVcp };

std::string_view to_string(NoiseProfile p);
std::string_view to_string(Predictor p);
std::string_view to_string(Method m);
NoiseProfile parse_noise_profile(std::string_view text);
Predictor parse_predictor(std::string_view text);
Method parse_method(std::string_view text);

/// Class counts of the 11 VA levels used by the imbalanced-va profile.
inline constexpr std::array<double, 11> kVaClassCounts = {
    3274, 2164, 1647, 2091, 2005, 3240, 3803, 4261, 4370, 6358, 21568};

struct ExperimentConfig {
  std::vector<std::uint64_t> seed_list = {0, 1, 2, 3, 4};
  std::size_t n_examples = 5000;
  std::size_t feature_dim = 4;
  std::size_t hidden_dim = 16;
  std::vector<double> epsilon_list = {0.2, 0.3, 0.4};
  double delta = 1e-5;
  std::array<double, 3> split_ratio = {0.6, 0.2, 0.2};
  NoiseProfile noise_profile = NoiseProfile::kHeteroscedastic;
  // Test-time noise scale is multiplied by (1 + shift_severity).
  double shift_severity = 0.0;
  Predictor predictor = Predictor::kTrained;
  // train.seed is ignored; each trial derives its own training seed.
  TrainConfig train;

  // Throws InvalidConfig.
  void validate() const;
};

/// Parse flat `key = value` lines. Blank lines and lines starting with '#'
/// are skipped; lists are comma separated. Keys:
///
///   seed_list, n_examples, feature_dim, hidden_dim, epsilon_list, delta,
///   split_ratio, noise_profile, shift_severity, predictor,
///   learning_rate, epochs, batch_size
///
/// Unknown or repeated keys are InvalidConfig errors. Missing keys keep
/// their defaults. The result is validated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Canonical key=value text covering every field, in a fixed order.
std::string config_to_text(const ExperimentConfig& config);

/// Synthetic stand-in for a labeled image set.
///
/// Every profile yields an "oracle" Gaussian prediction (oracle_mu,
/// true_sigma) under which y - oracle_mu = true_sigma * noise exactly, with
/// noise standard normal:
///
///   homoscedastic / heteroscedastic:
///     x ~ U[-1, 1]^d, oracle_mu = 5 + 3 tanh(w . x), y = oracle_mu + sigma(x) * noise,
///     sigma = 0.5 (homoscedastic) or 0.2 + 0.65 (1 + x_0) in [0.2, 1.5].
///   imbalanced-va:
///     level k drawn with frequency kVaClassCounts, y = k,
///     tau = 0.3 + 1.2 u with u ~ U[0, 1], measurement m = k - tau * noise,
///     x_0 = (m - 5) / 5, x_1 = 2u - 1, remaining features U[-1, 1];
///     oracle_mu = m, true_sigma = tau.
struct SyntheticDataset {
  NoiseProfile profile = NoiseProfile::kHeteroscedastic;
  std::size_t feature_dim = 0;
  std::vector<double> features;   // row-major, size() x feature_dim
  std::vector<double> labels;     // continuous y, never clamped
  std::vector<int> va_labels;     // y rounded and clamped to [0, 10]
  std::vector<double> oracle_mu;
  std::vector<double> true_sigma;
  std::vector<double> noise;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * feature_dim, feature_dim);
  }
  GaussianPrediction oracle_prediction(std::size_t i) const { return {oracle_mu[i], true_sigma[i]}; }

  SyntheticDataset subset(std::span<const std::size_t> indices) const;
  std::vector<Example> examples() const;
};

SyntheticDataset generate(const ExperimentConfig& config, std::uint64_t seed);

/// Rescale the noise of every example by (1 + severity), keeping the draws.
/// Regression profiles move y; imbalanced-va moves the measurement feature
/// and oracle_mu. true_sigma is left unchanged, so predictions calibrated
/// before the shift become overconfident.
void apply_noise_shift(SyntheticDataset& data, double severity);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Random partition of 0..n-1. Train and validation sizes are round(n * r),
/// test takes the rest. Throws InvalidConfig for a ratio that does not sum
/// to 1 or leaves a part empty.
SplitIndices split_indices(std::size_t n, const std::array<double, 3>& ratio, std::uint64_t seed);

struct DatasetSplit {
  SyntheticDataset train;
  SyntheticDataset validation;
  SyntheticDataset test;
};

DatasetSplit split(const SyntheticDataset& data, const std::array<double, 3>& ratio,
                   std::uint64_t seed);

/// One (seed, epsilon, method) result. Fields that need a finite interval
/// are empty when the calibration is infeasible.
struct ReportRow {
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  Method method = Method::kPac;
  bool feasible = false;
  std::optional<double> scale;       // c* for PAC, q_hat for VCP
  std::size_t k_required = 0;        // PAC only
  std::size_t n_cal = 0;
  std::size_t n_test = 0;
  std::optional<double> coverage;    // percent
  std::optional<double> avg_width;
  std::optional<double> width_std;   // population std of test widths
  double mae = 0.0;
  double macro_mae = 0.0;
  std::optional<double> ma_acc;      // percent
  double err_0_5 = 0.0;              // letter-score error histogram, percent
  double err_6_10 = 0.0;
  double err_11_plus = 0.0;
  std::size_t floored_letters = 0;   // test rows whose acuity hit the 0.01 floor
};

/// Train (or take oracle predictions), calibrate PAC and VCP per epsilon on
/// the validation split, evaluate on the test split. Rows are ordered by
/// epsilon as listed, PAC before VCP. Errors are rethrown with the seed.
std::vector<ReportRow> run_trial(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace pacvi
