#include "pacvi/record_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pacvi/errors.hpp"

namespace pacvi {
namespace {

double parse_field(const std::string& text, std::size_t line_no) {
  std::size_t b = text.find_first_not_of(" \t\r");
  std::size_t e = text.find_last_not_of(" \t\r");
  const std::string t = b == std::string::npos ? std::string() : text.substr(b, e - b + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw InvalidArgument("calibration CSV line " + std::to_string(line_no) + ": bad number '" +
                          text + "'");
  }
  return v;
}

}  // namespace

std::vector<CalibrationRecord> read_calibration_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("calibration CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "mu,sigma,y") {
    throw InvalidArgument("calibration CSV header must be 'mu,sigma,y', got '" + line + "'");
  }
  std::vector<CalibrationRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string f[3];
    std::size_t count = 0;
    for (std::string field; std::getline(ss, field, ',');) {
      if (count < 3) f[count] = field;
      ++count;
    }
    if (count != 3) {
      throw InvalidArgument("calibration CSV line " + std::to_string(line_no) +
                            ": expected 3 fields");
    }
    CalibrationRecord r{{parse_field(f[0], line_no), parse_field(f[1], line_no)},
                        parse_field(f[2], line_no)};
    if (!(r.prediction.sigma > 0.0)) {
      throw InvalidArgument("calibration CSV line " + std::to_string(line_no) +
                            ": sigma must be positive");
    }
    records.push_back(r);
  }
  return records;
}

void write_calibration_csv(std::ostream& out, std::span<const CalibrationRecord> records) {
  out << "mu,sigma,y\n";
  char buf[64];
  auto put = [&](double v) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, r.ptr - buf);
  };
  for (const auto& r : records) {
    put(r.prediction.mu);
    out << ',';
    put(r.prediction.sigma);
    out << ',';
    put(r.y);
    out << '\n';
  }
}

nlohmann::json to_json(const CalibrationResult& result) {
  nlohmann::json j;
  j["c_star"] = result.c_star ? nlohmann::json(*result.c_star) : nlohmann::json(nullptr);
  j["epsilon"] = result.target.epsilon();
  j["delta"] = result.target.delta();
  j["n"] = result.n;
  j["k_required"] = result.k_required;
  j["feasible"] = result.feasible;
  return j;
}

}  // namespace pacvi
