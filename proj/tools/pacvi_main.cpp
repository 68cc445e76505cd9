// pacvi: PAC prediction intervals from Gaussian predictions.
//
//   pacvi run --config PATH --out DIR [--parallel N]
//   pacvi calibrate --records CSV --epsilon E --delta D [--out FILE]
//   pacvi report --rows CSV [--out FILE]
//
// Exit codes: 0 success, 1 usage error, 2 trial failure, 3 I/O failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pacvi/errors.hpp"
#include "pacvi/pac_interval.hpp"
#include "pacvi/record_io.hpp"
#include "pacvi/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTrial = 2;
constexpr int kExitIo = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw pacvi::IoError("cannot write '" + out_path + "'");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pacvi::IoError("cannot open '" + path + "'");
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC prediction intervals for Gaussian regressors"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t parallel = 1;
  auto* run = app.add_subcommand("run", "run the seeded experiment suite");
  run->add_option("--config", config_path, "key=value config file")->required();
  run->add_option("--out", out_dir, "output directory for rows.csv and aggregates.json")
      ->required();
  run->add_option("--parallel", parallel, "trials to run concurrently")
      ->check(CLI::PositiveNumber);

  std::string records_path;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string out_file;
  auto* cal = app.add_subcommand("calibrate", "calibrate c* from a mu,sigma,y CSV");
  cal->add_option("--records", records_path, "calibration CSV")->required();
  cal->add_option("--epsilon", epsilon, "coverage error bound")->required();
  cal->add_option("--delta", delta, "significance level")->required();
  cal->add_option("--out", out_file, "write JSON here instead of stdout");

  std::string rows_path;
  auto* rep = app.add_subcommand("report", "recompute aggregates from a rows CSV");
  rep->add_option("--rows", rows_path, "rows.csv from a previous run")->required();
  rep->add_option("--out", out_file, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      const auto config = pacvi::load_config(config_path);
      const auto outcome = pacvi::run_suite_to_disk(config, out_dir, parallel);
      for (const auto& err : outcome.errors) std::cerr << "error: " << err << '\n';
      std::cerr << outcome.rows.size() << " rows written to " << out_dir << '\n';
      return outcome.ok() ? kExitOk : kExitTrial;
    }
    if (*cal) {
      auto in = open_input(records_path);
      const auto records = pacvi::read_calibration_csv(in);
      const auto result = pacvi::calibrate(records, pacvi::PacTarget(epsilon, delta));
      emit(pacvi::to_json(result).dump(2) + "\n", out_file);
      return kExitOk;
    }
    if (*rep) {
      auto in = open_input(rows_path);
      const auto rows = pacvi::read_rows_csv(in);
      pacvi::Provenance prov;
      for (const auto& r : rows) {
        if (prov.seeds.empty() || prov.seeds.back() != r.seed) prov.seeds.push_back(r.seed);
      }
      emit(pacvi::aggregate(rows, prov).dump(2) + "\n", out_file);
      return kExitOk;
    }
  } catch (const pacvi::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTrial;
  }
  return kExitUsage;
}
