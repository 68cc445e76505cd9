#include "pacvi/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "pacvi/errors.hpp"
#include "pacvi/rng.hpp"

namespace pacvi {
namespace {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("rows CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("rows CSV line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

std::optional<double> to_opt(const std::string& s, std::size_t line_no) {
  if (s.empty()) return std::nullopt;
  return to_double(s, line_no);
}

struct MetricColumn {
  const char* name;
  std::optional<double> (*get)(const ReportRow&);
};

const MetricColumn kMetrics[] = {
    {"coverage", [](const ReportRow& r) { return r.coverage; }},
    {"avg_width", [](const ReportRow& r) { return r.avg_width; }},
    {"width_std", [](const ReportRow& r) { return r.width_std; }},
    {"mae", [](const ReportRow& r) { return std::optional<double>(r.mae); }},
    {"macro_mae", [](const ReportRow& r) { return std::optional<double>(r.macro_mae); }},
    {"ma_acc", [](const ReportRow& r) { return r.ma_acc; }},
    {"scale", [](const ReportRow& r) { return r.scale; }},
    {"err_0_5", [](const ReportRow& r) { return std::optional<double>(r.err_0_5); }},
    {"err_6_10", [](const ReportRow& r) { return std::optional<double>(r.err_6_10); }},
    {"err_11_plus", [](const ReportRow& r) { return std::optional<double>(r.err_11_plus); }},
};

nlohmann::json summarize(const std::vector<double>& v) {
  nlohmann::json j;
  j["count"] = v.size();
  if (v.empty()) {
    j["mean"] = nullptr;
    j["std"] = nullptr;
    return j;
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  j["mean"] = mean;
  j["std"] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace

void write_rows_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << kRowColumns << '\n';
  for (const auto& r : rows) {
    out << r.seed << ',' << fmt(r.epsilon) << ',' << to_string(r.method) << ','
        << (r.feasible ? "true" : "false") << ',' << fmt(r.scale) << ',' << r.k_required << ','
        << r.n_cal << ',' << r.n_test << ',' << fmt(r.coverage) << ',' << fmt(r.avg_width) << ','
        << fmt(r.width_std) << ',' << fmt(r.mae) << ',' << fmt(r.macro_mae) << ','
        << fmt(r.ma_acc) << ',' << fmt(r.err_0_5) << ',' << fmt(r.err_6_10) << ','
        << fmt(r.err_11_plus) << ',' << r.floored_letters << '\n';
  }
}

std::vector<ReportRow> read_rows_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRowColumns) {
    throw InvalidArgument("rows CSV: header must be '" + std::string(kRowColumns) + "'");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 18) {
      throw InvalidArgument("rows CSV line " + std::to_string(line_no) + ": expected 18 fields");
    }
    ReportRow r;
    r.seed = to_uint(f[0], line_no);
    r.epsilon = to_double(f[1], line_no);
    r.method = parse_method(f[2]);
    if (f[3] != "true" && f[3] != "false") {
      throw InvalidArgument("rows CSV line " + std::to_string(line_no) + ": bad feasible flag");
    }
    r.feasible = f[3] == "true";
    r.scale = to_opt(f[4], line_no);
    r.k_required = to_uint(f[5], line_no);
    r.n_cal = to_uint(f[6], line_no);
    r.n_test = to_uint(f[7], line_no);
    r.coverage = to_opt(f[8], line_no);
    r.avg_width = to_opt(f[9], line_no);
    r.width_std = to_opt(f[10], line_no);
    r.mae = to_double(f[11], line_no);
    r.macro_mae = to_double(f[12], line_no);
    r.ma_acc = to_opt(f[13], line_no);
    r.err_0_5 = to_double(f[14], line_no);
    r.err_6_10 = to_double(f[15], line_no);
    r.err_11_plus = to_double(f[16], line_no);
    r.floored_letters = to_uint(f[17], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_text(config))));
  return buf;
}

nlohmann::json aggregate(std::span<const ReportRow> rows, const Provenance& provenance) {
  std::vector<double> eps_order;
  for (const auto& r : rows) {
    if (std::find(eps_order.begin(), eps_order.end(), r.epsilon) == eps_order.end()) {
      eps_order.push_back(r.epsilon);
    }
  }

  nlohmann::json groups = nlohmann::json::array();
  for (Method m : {Method::kPac, Method::kVcp}) {
    for (double eps : eps_order) {
      std::vector<const ReportRow*> members;
      for (const auto& r : rows) {
        if (r.method == m && r.epsilon == eps) members.push_back(&r);
      }
      if (members.empty()) continue;
      nlohmann::json g;
      g["method"] = std::string(to_string(m));
      g["epsilon"] = eps;
      g["trials"] = members.size();
      g["feasible_trials"] =
          std::count_if(members.begin(), members.end(), [](auto* r) { return r->feasible; });
      nlohmann::json metrics;
      for (const auto& col : kMetrics) {
        std::vector<double> values;
        for (const auto* r : members) {
          if (const auto v = col.get(*r)) values.push_back(*v);
        }
        metrics[col.name] = summarize(values);
      }
      g["metrics"] = std::move(metrics);
      groups.push_back(std::move(g));
    }
  }

  nlohmann::json prov;
  prov["config_hash"] = provenance.config_hash ? nlohmann::json(*provenance.config_hash) : nullptr;
  prov["seeds"] = provenance.seeds;

  nlohmann::json out;
  out["status"] = "ok";
  out["provenance"] = std::move(prov);
  out["groups"] = std::move(groups);
  return out;
}

SuiteOutcome run_suite(const ExperimentConfig& config, std::size_t parallel) {
  config.validate();
  const std::size_t n = config.seed_list.size();
  std::vector<std::vector<ReportRow>> results(n);
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_trial(config, config.seed_list[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(parallel, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SuiteOutcome outcome;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      outcome.errors.push_back(*errors[i]);
      continue;
    }
    outcome.rows.insert(outcome.rows.end(), results[i].begin(), results[i].end());
  }
  return outcome;
}

SuiteOutcome run_suite_to_disk(const ExperimentConfig& config,
                               const std::filesystem::path& out_dir, std::size_t parallel) {
  SuiteOutcome outcome = run_suite(config, parallel);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  std::ostringstream csv;
  write_rows_csv(csv, outcome.rows);
  write_file(out_dir / "rows.csv", csv.str());

  auto json = aggregate(outcome.rows, {config_hash(config), config.seed_list});
  if (!outcome.ok()) {
    json["status"] = "error";
    json["errors"] = outcome.errors;
  }
  write_file(out_dir / "aggregates.json", json.dump(2) + "\n");
  return outcome;
}

}  // namespace pacvi
