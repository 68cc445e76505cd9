#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "pacvi/pac_interval.hpp"

namespace pacvi {

// CSV with header `mu,sigma,y`, one decimal record per line. Throws
// InvalidArgument on a bad header, field count, number or sigma <= 0.
std::vector<CalibrationRecord> read_calibration_csv(std::istream& in);
void write_calibration_csv(std::ostream& out, std::span<const CalibrationRecord> records);

// {c_star, epsilon, delta, n, k_required, feasible}; c_star is null when
// infeasible.
nlohmann::json to_json(const CalibrationResult& result);

}  // namespace pacvi
