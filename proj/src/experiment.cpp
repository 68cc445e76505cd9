#include "pacvi/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pacvi/conformal.hpp"
#include "pacvi/errors.hpp"
#include "pacvi/pac_interval.hpp"
#include "pacvi/rng.hpp"
#include "pacvi/va_metrics.hpp"

namespace pacvi {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidConfig("config key '" + key + "': not a number: '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidConfig("config key '" + key + "': not an unsigned integer: '" + text + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Fixed mixing weights for the regression mean: alternating signs, unit norm
// scaled by 1.5.
double regression_mean(std::span<const double> x) {
  double dot = 0.0;
  const double w = 1.5 / std::sqrt(static_cast<double>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) dot += (j % 2 == 0 ? w : -w) * x[j];
  return 5.0 + 3.0 * std::tanh(dot);
}

std::size_t sample_va_level(Rng& rng) {
  static const double total = std::accumulate(kVaClassCounts.begin(), kVaClassCounts.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t k = 0; k < kVaClassCounts.size(); ++k) {
    if (u < kVaClassCounts[k]) return k;
    u -= kVaClassCounts[k];
  }
  return kVaClassCounts.size() - 1;
}

int to_va_label(double y) { return VaLabel::from_continuous(y).klass(); }

// Measurement-feature layout for imbalanced-va.
void set_measurement(SyntheticDataset& d, std::size_t i, double factor) {
  const double m = d.labels[i] - factor * d.true_sigma[i] * d.noise[i];
  d.oracle_mu[i] = m;
  d.features[i * d.feature_dim] = (m - 5.0) / 5.0;
}

}  // namespace

std::string_view to_string(NoiseProfile p) {
  switch (p) {
    case NoiseProfile::kHomoscedastic: return "homoscedastic";
    case NoiseProfile::kHeteroscedastic: return "heteroscedastic";
    case NoiseProfile::kImbalancedVa: return "imbalanced-va";
  }
  return "?";
}

std::string_view to_string(Predictor p) {
  return p == Predictor::kTrained ? "trained" : "oracle";
}

std::string_view to_string(Method m) { return m == Method::kPac ? "PAC" : "VCP"; }

NoiseProfile parse_noise_profile(std::string_view text) {
  if (text == "homoscedastic") return NoiseProfile::kHomoscedastic;
  if (text == "heteroscedastic") return NoiseProfile::kHeteroscedastic;
  if (text == "imbalanced-va") return NoiseProfile::kImbalancedVa;
  throw InvalidConfig("unknown noise_profile '" + std::string(text) + "'");
}

Predictor parse_predictor(std::string_view text) {
  if (text == "trained") return Predictor::kTrained;
  if (text == "oracle") return Predictor::kOracle;
  throw InvalidConfig("unknown predictor '" + std::string(text) + "'");
}

Method parse_method(std::string_view text) {
  if (text == "PAC") return Method::kPac;
  if (text == "VCP") return Method::kVcp;
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (seed_list.empty()) throw InvalidConfig("seed_list is empty");
  if (epsilon_list.empty()) throw InvalidConfig("epsilon_list is empty");
  for (double e : epsilon_list) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidConfig("epsilon_list values must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  if (feature_dim < 1) throw InvalidConfig("feature_dim must be >= 1");
  if (noise_profile == NoiseProfile::kImbalancedVa && feature_dim < 2) {
    throw InvalidConfig("imbalanced-va needs feature_dim >= 2");
  }
  for (double r : split_ratio) {
    if (!(r >= 0.0)) throw InvalidConfig("split_ratio entries must be nonnegative");
  }
  if (std::abs(split_ratio[0] + split_ratio[1] + split_ratio[2] - 1.0) > 1e-9) {
    throw InvalidConfig("split_ratio must sum to 1");
  }
  if (!(shift_severity >= 0.0) || !std::isfinite(shift_severity)) {
    throw InvalidConfig("shift_severity must be finite and >= 0");
  }
  train.validate();
  // Surfaces a degenerate split before any trial runs.
  (void)split_indices(n_examples, split_ratio, 0);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (!seen.insert(key).second) throw InvalidConfig("config key '" + key + "' repeated");

    if (key == "seed_list") {
      c.seed_list.clear();
      for (const auto& s : split_list(value)) c.seed_list.push_back(parse_uint(key, s));
    } else if (key == "n_examples") {
      c.n_examples = parse_uint(key, value);
    } else if (key == "feature_dim") {
      c.feature_dim = parse_uint(key, value);
    } else if (key == "hidden_dim") {
      c.hidden_dim = parse_uint(key, value);
    } else if (key == "epsilon_list") {
      c.epsilon_list.clear();
      for (const auto& s : split_list(value)) c.epsilon_list.push_back(parse_double(key, s));
    } else if (key == "delta") {
      c.delta = parse_double(key, value);
    } else if (key == "split_ratio") {
      const auto parts = split_list(value);
      if (parts.size() != 3) throw InvalidConfig("split_ratio needs three values");
      for (std::size_t i = 0; i < 3; ++i) c.split_ratio[i] = parse_double(key, parts[i]);
    } else if (key == "noise_profile") {
      c.noise_profile = parse_noise_profile(value);
    } else if (key == "shift_severity") {
      c.shift_severity = parse_double(key, value);
    } else if (key == "predictor") {
      c.predictor = parse_predictor(value);
    } else if (key == "learning_rate") {
      c.train.learning_rate = parse_double(key, value);
    } else if (key == "epochs") {
      c.train.epochs = parse_uint(key, value);
    } else if (key == "batch_size") {
      c.train.batch_size = parse_uint(key, value);
    } else {
      throw InvalidConfig("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  auto join = [](const auto& values, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + fmt(values[i]);
    return s;
  };
  out << "seed_list=" << join(c.seed_list, [](auto v) { return std::to_string(v); }) << '\n'
      << "n_examples=" << c.n_examples << '\n'
      << "feature_dim=" << c.feature_dim << '\n'
      << "hidden_dim=" << c.hidden_dim << '\n'
      << "epsilon_list=" << join(c.epsilon_list, format_double) << '\n'
      << "delta=" << format_double(c.delta) << '\n'
      << "split_ratio=" << join(c.split_ratio, format_double) << '\n'
      << "noise_profile=" << to_string(c.noise_profile) << '\n'
      << "shift_severity=" << format_double(c.shift_severity) << '\n'
      << "predictor=" << to_string(c.predictor) << '\n'
      << "learning_rate=" << format_double(c.train.learning_rate) << '\n'
      << "epochs=" << c.train.epochs << '\n'
      << "batch_size=" << c.train.batch_size << '\n';
  return out.str();
}

SyntheticDataset SyntheticDataset::subset(std::span<const std::size_t> indices) const {
  SyntheticDataset out;
  out.profile = profile;
  out.feature_dim = feature_dim;
  out.features.reserve(indices.size() * feature_dim);
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
    out.va_labels.push_back(va_labels[i]);
    out.oracle_mu.push_back(oracle_mu[i]);
    out.true_sigma.push_back(true_sigma[i]);
    out.noise.push_back(noise[i]);
  }
  return out;
}

std::vector<Example> SyntheticDataset::examples() const {
  std::vector<Example> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto r = row(i);
    out[i].features.assign(r.begin(), r.end());
    out[i].y = labels[i];
  }
  return out;
}

SyntheticDataset generate(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.n_examples == 0) throw InvalidConfig("n_examples must be positive");
  if (config.feature_dim == 0) throw InvalidConfig("feature_dim must be >= 1");
  if (config.noise_profile == NoiseProfile::kImbalancedVa && config.feature_dim < 2) {
    throw InvalidConfig("imbalanced-va needs feature_dim >= 2");
  }
  const std::size_t n = config.n_examples;
  const std::size_t d = config.feature_dim;
  Rng rng(derive_seed(seed, "data"));

  SyntheticDataset data;
  data.profile = config.noise_profile;
  data.feature_dim = d;
  data.features.resize(n * d);
  data.labels.resize(n);
  data.va_labels.resize(n);
  data.oracle_mu.resize(n);
  data.true_sigma.resize(n);
  data.noise.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    double* x = data.features.data() + i * d;
    if (config.noise_profile == NoiseProfile::kImbalancedVa) {
      const auto level = static_cast<double>(sample_va_level(rng));
      const double u = rng.uniform();
      data.labels[i] = level;
      data.true_sigma[i] = 0.3 + 1.2 * u;
      data.noise[i] = rng.normal();
      x[1] = 2.0 * u - 1.0;
      for (std::size_t j = 2; j < d; ++j) x[j] = rng.uniform(-1.0, 1.0);
      set_measurement(data, i, 1.0);
    } else {
      for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform(-1.0, 1.0);
      const double mean = regression_mean(std::span<const double>(x, d));
      const double sigma = config.noise_profile == NoiseProfile::kHomoscedastic
                               ? 0.5
                               : 0.2 + 0.65 * (1.0 + x[0]);
      data.oracle_mu[i] = mean;
      data.true_sigma[i] = sigma;
      data.noise[i] = rng.normal();
      data.labels[i] = mean + sigma * data.noise[i];
    }
    data.va_labels[i] = to_va_label(data.labels[i]);
  }
  return data;
}

void apply_noise_shift(SyntheticDataset& data, double severity) {
  if (!(severity >= 0.0) || !std::isfinite(severity)) {
    throw InvalidArgument("shift severity must be finite and >= 0");
  }
  const double factor = 1.0 + severity;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.profile == NoiseProfile::kImbalancedVa) {
      set_measurement(data, i, factor);
    } else {
      data.labels[i] = data.oracle_mu[i] + factor * data.true_sigma[i] * data.noise[i];
      data.va_labels[i] = to_va_label(data.labels[i]);
    }
  }
}

SplitIndices split_indices(std::size_t n, const std::array<double, 3>& ratio, std::uint64_t seed) {
  if (std::abs(ratio[0] + ratio[1] + ratio[2] - 1.0) > 1e-9 || ratio[0] < 0.0 ||
      ratio[1] < 0.0 || ratio[2] < 0.0) {
    throw InvalidConfig("split ratio must be nonnegative and sum to 1");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio[0]));
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio[1]));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw InvalidConfig("degenerate split: n = " + std::to_string(n) +
                        " leaves a train, validation or test part empty");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(std::span<std::size_t>(order));

  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

DatasetSplit split(const SyntheticDataset& data, const std::array<double, 3>& ratio,
                   std::uint64_t seed) {
  const auto idx = split_indices(data.size(), ratio, seed);
  return {data.subset(idx.train), data.subset(idx.validation), data.subset(idx.test)};
}

namespace {

std::vector<GaussianPrediction> predict_all(const SyntheticDataset& data,
                                            const RegressorModel* model) {
  std::vector<GaussianPrediction> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = model ? model->predict(data.row(i)) : data.oracle_prediction(i);
  }
  return out;
}

void fill_point_metrics(ReportRow& row, const SyntheticDataset& test,
                        std::span<const GaussianPrediction> pred) {
  std::vector<EvaluatedExample> ex(test.size());
  std::vector<double> letter_errors(test.size());
  std::size_t floored = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    ex[i] = {test.labels[i], pred[i].mu, pred[i].sigma, std::nullopt};
    bool f_true = false;
    bool f_pred = false;
    const double truth = letter_score_from_label(test.va_labels[i], &f_true);
    const double guess = letter_score_from_label(pred[i].mu, &f_pred);
    letter_errors[i] = std::abs(truth - guess);
    floored += (f_true || f_pred) ? 1 : 0;
  }
  row.mae = mean_absolute_error(ex);
  row.macro_mae = macro_mae(ex);
  const auto hist = error_range_distribution(letter_errors);
  row.err_0_5 = hist.pct_0_5;
  row.err_6_10 = hist.pct_6_10;
  row.err_11_plus = hist.pct_11_plus;
  row.floored_letters = floored;
}

void fill_interval_metrics(ReportRow& row, const SyntheticDataset& test,
                           std::span<const GaussianPrediction> pred,
                           std::span<const Interval> intervals) {
  std::vector<EvaluatedExample> ex(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    ex[i] = {test.labels[i], pred[i].mu, pred[i].sigma, intervals[i]};
  }
  row.coverage = coverage_rate(ex);
  row.avg_width = average_width(ex);
  row.width_std = std::sqrt(width_variance(ex));
  row.ma_acc = interval_ma_acc(ex);
}

std::vector<ReportRow> run_trial_impl(const ExperimentConfig& config, std::uint64_t seed) {
  const SyntheticDataset data = generate(config, seed);
  DatasetSplit parts = split(data, config.split_ratio, seed);
  if (config.shift_severity > 0.0) apply_noise_shift(parts.test, config.shift_severity);

  std::optional<RegressorModel> model;
  if (config.predictor == Predictor::kTrained) {
    TrainConfig tc = config.train;
    tc.seed = derive_seed(seed, "train");
    const auto train = parts.train.examples();
    model = fit(train, config.hidden_dim, tc);
  }
  const RegressorModel* m = model ? &*model : nullptr;
  const auto val_pred = predict_all(parts.validation, m);
  const auto test_pred = predict_all(parts.test, m);

  std::vector<double> scores(parts.validation.size());
  std::vector<double> residuals(parts.validation.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const CalibrationRecord rec{val_pred[i], parts.validation.labels[i]};
    scores[i] = normalized_score(rec);
    residuals[i] = std::abs(rec.y - rec.prediction.mu);
  }

  ReportRow base;
  base.seed = seed;
  base.n_cal = parts.validation.size();
  base.n_test = parts.test.size();
  fill_point_metrics(base, parts.test, test_pred);

  std::vector<ReportRow> rows;
  std::vector<Interval> intervals(parts.test.size());
  for (double eps : config.epsilon_list) {
    ReportRow pac = base;
    pac.epsilon = eps;
    pac.method = Method::kPac;
    const auto cal = calibrate_scores(scores, PacTarget(eps, config.delta));
    pac.feasible = cal.feasible;
    if (cal.feasible) {
      pac.scale = *cal.c_star;
      pac.k_required = cal.k_required;
      for (std::size_t i = 0; i < intervals.size(); ++i) {
        intervals[i] = build_interval(test_pred[i], *cal.c_star);
      }
      fill_interval_metrics(pac, parts.test, test_pred, intervals);
    }
    rows.push_back(pac);

    ReportRow vcp = base;
    vcp.epsilon = eps;
    vcp.method = Method::kVcp;
    const auto q = vcp_calibrate(residuals, eps);
    vcp.feasible = q.finite();
    if (q.finite()) {
      vcp.scale = q.q_hat;
      for (std::size_t i = 0; i < intervals.size(); ++i) {
        intervals[i] = vcp_interval(test_pred[i].mu, q);
      }
      fill_interval_metrics(vcp, parts.test, test_pred, intervals);
    }
    rows.push_back(vcp);
  }
  return rows;
}

}  // namespace

std::vector<ReportRow> run_trial(const ExperimentConfig& config, std::uint64_t seed) {
  try {
    return run_trial_impl(config, seed);
  } catch (const std::exception& e) {
    throw std::runtime_error("trial seed " + std::to_string(seed) + ": " + e.what());
  }
}

}  // namespace pacvi
