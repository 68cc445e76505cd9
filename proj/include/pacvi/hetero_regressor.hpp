#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pacvi/types.hpp"

namespace pacvi {

struct Example {
  std::vector<double> features;
  double y = 0.0;
};

struct TrainConfig {
  double learning_rate = 0.02;
  std::size_t epochs = 150;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  // Global L2 norm cap on each mini-batch gradient; 0 disables clipping.
  double grad_clip = 5.0;

  // Throws InvalidConfig.
  void validate() const;
};

/// Two-layer perceptron with a mean head and a log-sigma head.
///
/// Parameter order in the flat vector (H = hidden_dim, D = feature_dim):
///
///   H > 0:  W1 (H x D, row-major), b1 (H), w_mu (H), b_mu, w_logsigma (H), b_logsigma
///   H = 0:  w_mu (D), b_mu, w_logsigma (D), b_logsigma
///
/// With H > 0 the hidden layer is tanh; H = 0 makes both heads linear in the
/// features. sigma = exp(log-sigma head), so it is positive for every input.
class RegressorModel {
 public:
  // All-zero parameters: mu = 0 and sigma = 1 everywhere.
  RegressorModel(std::size_t feature_dim, std::size_t hidden_dim);
  // Throws DimensionMismatch unless parameters.size() == parameter_count(...).
  RegressorModel(std::size_t feature_dim, std::size_t hidden_dim, std::vector<double> parameters);

  static std::size_t parameter_count(std::size_t feature_dim, std::size_t hidden_dim);

  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::span<const double> parameters() const { return parameters_; }
  std::span<double> mutable_parameters() { return parameters_; }

  GaussianPrediction predict(std::span<const double> features) const;

  // Flat text: "feature_dim hidden_dim" then one parameter per line (%.17g).
  void save(std::ostream& out) const;
  static RegressorModel load(std::istream& in);

 private:
  std::size_t feature_dim_;
  std::size_t hidden_dim_;
  std::vector<double> parameters_;
};

/// Gaussian negative log-likelihood 0.5*ln(2*pi*sigma^2) + (y-mu)^2 / (2*sigma^2).
double nll_loss(const GaussianPrediction& pred, double y);

double mean_nll(const RegressorModel& model, std::span<const Example> batch);

/// Gradient of the mean batch NLL with respect to every parameter, in the
/// layout documented on RegressorModel.
std::vector<double> nll_gradient(const RegressorModel& model, std::span<const Example> batch);

struct FitResult {
  RegressorModel model;
  double initial_nll = 0.0;         // mean training NLL before the first update
  std::vector<double> epoch_nll;    // mean training NLL after each epoch
};

/// Mini-batch gradient descent on the mean NLL with a fixed learning rate.
/// Each batch gradient is rescaled to at most config.grad_clip in L2 norm.
///
/// Hidden and head weights start uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
/// The output biases start at the mean and log standard deviation of y, with
/// sd floored at 0.1. Deterministic for a fixed seed.
FitResult fit_with_history(std::span<const Example> dataset, std::size_t hidden_dim,
                           const TrainConfig& config);

RegressorModel fit(std::span<const Example> dataset, std::size_t hidden_dim,
                   const TrainConfig& config);

}  // namespace pacvi
