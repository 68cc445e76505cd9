#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pacvi/experiment.hpp"

namespace pacvi {

/// Column order of the rows CSV.
inline constexpr const char* kRowColumns =
    "seed,epsilon,method,feasible,scale,k_required,n_cal,n_test,coverage,avg_width,"
    "width_std,mae,macro_mae,ma_acc,err_0_5,err_6_10,err_11_plus,floored_letters";

void write_rows_csv(std::ostream& out, std::span<const ReportRow> rows);
// Throws InvalidArgument on a wrong header or malformed row.
std::vector<ReportRow> read_rows_csv(std::istream& in);

struct Provenance {
  std::optional<std::string> config_hash;  // FNV-1a of config_to_text, hex
  std::vector<std::uint64_t> seeds;
};

/// Mean and sample standard deviation (n - 1; 0 for a single value) of every
/// metric per (method, epsilon) group over the rows where it is present.
/// Groups are ordered PAC then VCP, epsilons in order of first appearance.
nlohmann::json aggregate(std::span<const ReportRow> rows, const Provenance& provenance);

std::string config_hash(const ExperimentConfig& config);

struct SuiteOutcome {
  std::vector<ReportRow> rows;
  std::vector<std::string> errors;  // one per failed trial, seed order
  bool ok() const { return errors.empty(); }
};

/// Run every seed (up to `parallel` trials at once) and merge rows in
/// seed_list order. Failed trials contribute no rows and an error entry.
SuiteOutcome run_suite(const ExperimentConfig& config, std::size_t parallel = 1);

/// run_suite() plus `rows.csv` and `aggregates.json` under out_dir. When a
/// trial failed, the JSON carries "status": "error" and the messages.
/// Throws IoError if the files cannot be written.
SuiteOutcome run_suite_to_disk(const ExperimentConfig& config,
                               const std::filesystem::path& out_dir, std::size_t parallel = 1);

}  // namespace pacvi
