#include "pacvi/va_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "pacvi/errors.hpp"

namespace pacvi {
namespace {

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw EmptyInput(std::string(what) + ": no examples");
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

VaLabel::VaLabel(int klass) : klass_(klass) {
  if (klass < 0 || klass > 10) {
    throw InvalidArgument("VA level must be in [0, 10], got " + std::to_string(klass));
  }
}

VaLabel VaLabel::from_continuous(double y) {
  if (!std::isfinite(y)) throw InvalidArgument("VA label must be finite");
  return VaLabel(static_cast<int>(std::lround(std::clamp(y, 0.0, 10.0))));
}

double EvaluatedExample::abs_error() const { return std::abs(y - mu); }

double coverage_rate(std::span<const EvaluatedExample> examples) {
  require_nonempty(examples.size(), "coverage_rate");
  std::size_t covered = 0;
  for (const auto& e : examples) {
    if (!e.interval) throw InvalidArgument("coverage_rate: example without interval");
    covered += e.covered() ? 1 : 0;
  }
  return 100.0 * static_cast<double>(covered) / static_cast<double>(examples.size());
}

double average_width(std::span<const EvaluatedExample> examples) {
  require_nonempty(examples.size(), "average_width");
  double total = 0.0;
  for (const auto& e : examples) {
    if (!e.interval) throw InvalidArgument("average_width: example without interval");
    if (!e.interval->bounded()) throw InvalidArgument("average_width: unbounded interval");
    total += e.interval->width();
  }
  return total / static_cast<double>(examples.size());
}

double width_variance(std::span<const EvaluatedExample> examples) {
  (void)average_width(examples);  // validates: nonempty, bounded
  // Welford: constant widths give exactly zero.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (const auto& e : examples) {
    const double w = e.interval->width();
    ++k;
    const double d = w - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (w - mean);
  }
  return m2 / static_cast<double>(k);
}

double mean_absolute_error(std::span<const EvaluatedExample> examples) {
  require_nonempty(examples.size(), "mean_absolute_error");
  double total = 0.0;
  for (const auto& e : examples) total += e.abs_error();
  return total / static_cast<double>(examples.size());
}

double macro_mae(std::span<const EvaluatedExample> examples) {
  require_nonempty(examples.size(), "macro_mae");
  std::array<double, 11> sum{};
  std::array<std::size_t, 11> count{};
  for (const auto& e : examples) {
    const int k = VaLabel::from_continuous(e.y).klass();
    sum[k] += e.abs_error();
    ++count[k];
  }
  double total = 0.0;
  int present = 0;
  for (int k = 0; k <= 10; ++k) {
    if (count[k] == 0) continue;
    total += sum[k] / static_cast<double>(count[k]);
    ++present;
  }
  return total / present;
}

int map_to_4level(const VaLabel& label) {
  static constexpr std::array<int, 11> kLevel = {0, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3};
  return kLevel[static_cast<std::size_t>(label.klass())];
}

double interval_ma_acc(std::span<const EvaluatedExample> examples) {
  require_nonempty(examples.size(), "interval_ma_acc");
  std::array<std::size_t, 4> hit{};
  std::array<std::size_t, 4> count{};
  for (const auto& e : examples) {
    if (!e.interval) throw InvalidArgument("interval_ma_acc: example without interval");
    const int level = map_to_4level(VaLabel::from_continuous(e.y));
    ++count[level];
    hit[level] += e.covered() ? 1 : 0;
  }
  double total = 0.0;
  int present = 0;
  for (int c = 0; c < 4; ++c) {
    if (count[c] == 0) continue;
    total += static_cast<double>(hit[c]) / static_cast<double>(count[c]);
    ++present;
  }
  return 100.0 * total / present;
}

double letter_score(double decimal_acuity) {
  if (!(decimal_acuity > 0.0) || !std::isfinite(decimal_acuity)) {
    throw InvalidArgument("decimal acuity must be positive, got " +
                          std::to_string(decimal_acuity));
  }
  // log10 is exact at powers of ten, so L(1) = 85 and L(0.1) = 35 exactly.
  return 85.0 + 50.0 * std::log10(decimal_acuity);
}

double letter_score_from_label(double label, bool* floored) {
  const double f = std::clamp(label, 0.0, 10.0) / 10.0;
  const bool low = f < kMinDecimalAcuity;
  if (floored) *floored = low;
  return letter_score(low ? kMinDecimalAcuity : f);
}

ErrorRangeHistogram error_range_distribution(std::span<const double> letter_errors) {
  require_nonempty(letter_errors.size(), "error_range_distribution");
  std::array<std::size_t, 3> bucket{};
  for (double e : letter_errors) {
    if (!(e >= 0.0)) throw InvalidArgument("letter-score errors must be nonnegative");
    const double r = std::round(e);
    bucket[r <= 5.0 ? 0 : (r <= 10.0 ? 1 : 2)]++;
  }
  const double n = static_cast<double>(letter_errors.size());
  ErrorRangeHistogram h;
  h.pct_0_5 = 100.0 * static_cast<double>(bucket[0]) / n;
  h.pct_6_10 = 100.0 * static_cast<double>(bucket[1]) / n;
  h.pct_11_plus = 100.0 * static_cast<double>(bucket[2]) / n;
  return h;
}

std::vector<BinSummary> equal_mass_bins(std::span<const EvaluatedExample> examples,
                                        std::size_t n_bins) {
  if (n_bins < 1) throw InvalidArgument("equal_mass_bins needs at least one bin");
  if (examples.size() < n_bins) {
    throw InvalidArgument("equal_mass_bins: " + std::to_string(examples.size()) +
                          " examples cannot fill " + std::to_string(n_bins) + " bins");
  }
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return examples[a].abs_error() < examples[b].abs_error();
  });

  const std::size_t base = examples.size() / n_bins;
  const std::size_t extra = examples.size() % n_bins;
  std::vector<BinSummary> bins(n_bins);
  std::size_t at = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    BinSummary& s = bins[b];
    s.count = size;
    for (std::size_t i = 0; i < size; ++i, ++at) {
      s.mean_abs_error += examples[order[at]].abs_error();
      s.mean_sigma += examples[order[at]].sigma;
    }
    s.mean_abs_error /= static_cast<double>(size);
    s.mean_sigma /= static_cast<double>(size);
  }
  return bins;
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("spearman: length mismatch");
  if (a.size() < 2) throw InvalidArgument("spearman: need at least two points");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace pacvi
