#include "pacvi/hetero_regressor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include "pacvi/errors.hpp"
#include "pacvi/rng.hpp"

namespace pacvi {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Offsets into the flat parameter vector.
struct Layout {
  std::size_t w1 = 0, b1 = 0, w_mu = 0, b_mu = 0, w_ls = 0, b_ls = 0, total = 0;
  std::size_t head_inputs = 0;

  Layout(std::size_t d, std::size_t h) {
    head_inputs = h > 0 ? h : d;
    std::size_t at = 0;
    if (h > 0) {
      w1 = at;
      at += h * d;
      b1 = at;
      at += h;
    }
    w_mu = at;
    at += head_inputs;
    b_mu = at++;
    w_ls = at;
    at += head_inputs;
    b_ls = at++;
    total = at;
  }
};

struct Forward {
  std::vector<double> hidden;  // tanh activations, or a copy of the features when H = 0
  double mu = 0.0;
  double log_sigma = 0.0;
};

void check_features(const RegressorModel& model, std::span<const double> features) {
  if (features.size() != model.feature_dim()) {
    throw DimensionMismatch("expected " + std::to_string(model.feature_dim()) +
                            " features, got " + std::to_string(features.size()));
  }
}

Forward forward(const RegressorModel& model, std::span<const double> x) {
  const Layout at(model.feature_dim(), model.hidden_dim());
  const auto p = model.parameters();
  const std::size_t d = model.feature_dim();
  const std::size_t h = model.hidden_dim();

  Forward f;
  if (h > 0) {
    f.hidden.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
      double a = p[at.b1 + i];
      for (std::size_t j = 0; j < d; ++j) a += p[at.w1 + i * d + j] * x[j];
      f.hidden[i] = std::tanh(a);
    }
  } else {
    f.hidden.assign(x.begin(), x.end());
  }
  f.mu = p[at.b_mu];
  f.log_sigma = p[at.b_ls];
  for (std::size_t i = 0; i < at.head_inputs; ++i) {
    f.mu += p[at.w_mu + i] * f.hidden[i];
    f.log_sigma += p[at.w_ls + i] * f.hidden[i];
  }
  return f;
}

double nll_from_log_sigma(double mu, double log_sigma, double y) {
  const double r = y - mu;
  return kHalfLog2Pi + log_sigma + 0.5 * r * r * std::exp(-2.0 * log_sigma);
}

void check_batch(const RegressorModel& model, std::span<const Example> batch) {
  if (batch.empty()) throw EmptyInput("batch is empty");
  for (const auto& ex : batch) check_features(model, ex.features);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("learning_rate must be positive");
  }
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  if (!(grad_clip >= 0.0)) throw InvalidConfig("grad_clip must be >= 0");
}

RegressorModel::RegressorModel(std::size_t feature_dim, std::size_t hidden_dim)
    : feature_dim_(feature_dim),
      hidden_dim_(hidden_dim),
      parameters_(parameter_count(feature_dim, hidden_dim), 0.0) {}

RegressorModel::RegressorModel(std::size_t feature_dim, std::size_t hidden_dim,
                               std::vector<double> parameters)
    : feature_dim_(feature_dim), hidden_dim_(hidden_dim), parameters_(std::move(parameters)) {
  const std::size_t want = parameter_count(feature_dim, hidden_dim);
  if (parameters_.size() != want) {
    throw DimensionMismatch("model with feature_dim " + std::to_string(feature_dim) +
                            " and hidden_dim " + std::to_string(hidden_dim) + " needs " +
                            std::to_string(want) + " parameters, got " +
                            std::to_string(parameters_.size()));
  }
}

std::size_t RegressorModel::parameter_count(std::size_t feature_dim, std::size_t hidden_dim) {
  return Layout(feature_dim, hidden_dim).total;
}

GaussianPrediction RegressorModel::predict(std::span<const double> features) const {
  check_features(*this, features);
  const Forward f = forward(*this, features);
  return {f.mu, std::exp(f.log_sigma)};
}

void RegressorModel::save(std::ostream& out) const {
  out << feature_dim_ << ' ' << hidden_dim_ << '\n';
  char buf[40];
  for (double v : parameters_) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
  if (!out) throw IoError("failed to write model");
}

RegressorModel RegressorModel::load(std::istream& in) {
  std::size_t d = 0;
  std::size_t h = 0;
  if (!(in >> d >> h)) throw IoError("model file: missing 'feature_dim hidden_dim' header");
  std::vector<double> params(parameter_count(d, h));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(in >> params[i])) {
      throw IoError("model file: expected " + std::to_string(params.size()) +
                    " parameters, read " + std::to_string(i));
    }
  }
  std::string extra;
  if (in >> extra) throw IoError("model file: trailing data after parameters");
  return RegressorModel(d, h, std::move(params));
}

double nll_loss(const GaussianPrediction& pred, double y) {
  if (!(pred.sigma > 0.0)) {
    throw InvalidArgument("nll_loss needs sigma > 0, got " + std::to_string(pred.sigma));
  }
  const double r = y - pred.mu;
  return kHalfLog2Pi + std::log(pred.sigma) + r * r / (2.0 * pred.sigma * pred.sigma);
}

double mean_nll(const RegressorModel& model, std::span<const Example> batch) {
  check_batch(model, batch);
  double total = 0.0;
  for (const auto& ex : batch) {
    const Forward f = forward(model, ex.features);
    total += nll_from_log_sigma(f.mu, f.log_sigma, ex.y);
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> nll_gradient(const RegressorModel& model, std::span<const Example> batch) {
  check_batch(model, batch);
  const Layout at(model.feature_dim(), model.hidden_dim());
  const auto p = model.parameters();
  const std::size_t d = model.feature_dim();
  const std::size_t h = model.hidden_dim();
  const double scale = 1.0 / static_cast<double>(batch.size());

  std::vector<double> grad(at.total, 0.0);
  for (const auto& ex : batch) {
    const Forward f = forward(model, ex.features);
    const double inv_var = std::exp(-2.0 * f.log_sigma);
    const double r = ex.y - f.mu;
    const double d_mu = -r * inv_var * scale;
    const double d_ls = (1.0 - r * r * inv_var) * scale;

    grad[at.b_mu] += d_mu;
    grad[at.b_ls] += d_ls;
    for (std::size_t i = 0; i < at.head_inputs; ++i) {
      grad[at.w_mu + i] += d_mu * f.hidden[i];
      grad[at.w_ls + i] += d_ls * f.hidden[i];
    }
    if (h == 0) continue;
    for (std::size_t i = 0; i < h; ++i) {
      const double d_z = d_mu * p[at.w_mu + i] + d_ls * p[at.w_ls + i];
      const double d_a = d_z * (1.0 - f.hidden[i] * f.hidden[i]);
      grad[at.b1 + i] += d_a;
      for (std::size_t j = 0; j < d; ++j) grad[at.w1 + i * d + j] += d_a * ex.features[j];
    }
  }
  return grad;
}

FitResult fit_with_history(std::span<const Example> dataset, std::size_t hidden_dim,
                           const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw EmptyInput("training set is empty");
  const std::size_t d = dataset.front().features.size();

  RegressorModel model(d, hidden_dim);
  check_batch(model, dataset);

  const Layout at(d, hidden_dim);
  auto params = model.mutable_parameters();
  Rng init_rng(derive_seed(config.seed, "regressor/init"));
  if (hidden_dim > 0) {
    const double s1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(d, 1)));
    for (std::size_t i = 0; i < hidden_dim * d + hidden_dim; ++i) {
      params[at.w1 + i] = init_rng.uniform(-s1, s1);
    }
  }
  const double s2 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(at.head_inputs, 1)));
  for (std::size_t i = 0; i < at.head_inputs; ++i) {
    params[at.w_mu + i] = init_rng.uniform(-s2, s2);
    params[at.w_ls + i] = init_rng.uniform(-s2, s2);
  }

  double mean_y = 0.0;
  for (const auto& ex : dataset) mean_y += ex.y;
  mean_y /= static_cast<double>(dataset.size());
  double var_y = 0.0;
  for (const auto& ex : dataset) var_y += (ex.y - mean_y) * (ex.y - mean_y);
  var_y /= static_cast<double>(dataset.size());
  params[at.b_mu] = mean_y;
  params[at.b_ls] = 0.5 * std::log(std::max(var_y, 1e-2));

  FitResult result{model, mean_nll(model, dataset), {}};
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(config.seed, "regressor/shuffle"));
  std::vector<Example> batch;
  batch.reserve(config.batch_size);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(dataset[order[i]]);
      const auto grad = nll_gradient(model, batch);
      double step = config.learning_rate;
      if (config.grad_clip > 0.0) {
        double norm2 = 0.0;
        for (double g : grad) norm2 += g * g;
        const double norm = std::sqrt(norm2);
        if (norm > config.grad_clip) step *= config.grad_clip / norm;
      }
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= step * grad[i];
    }
    result.epoch_nll.push_back(mean_nll(model, dataset));
  }
  result.model = std::move(model);
  return result;
}

RegressorModel fit(std::span<const Example> dataset, std::size_t hidden_dim,
                   const TrainConfig& config) {
  return fit_with_history(dataset, hidden_dim, config).model;
}

}  // namespace pacvi
