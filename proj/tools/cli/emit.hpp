#pragma once

#include <string>

#include "cli/report.hpp"

namespace abkit::cli {

// Shortest text that reads back to the same double.
std::string format_number(double v);

// RFC 4180 CSV: quantity, value, units, error_estimate, plus parameter and
// parameter_value when the report scans a parameter.
std::string to_csv(const Report& report);

// JSON object with the same fields in a fixed key order.
std::string to_json(const Report& report);
Report report_from_json(const std::string& text);

// Single-series SVG line chart of value against parameter_value.
std::string to_svg(const Report& report, bool log_x);

// Writes text to path; "-" writes to standard output. Throws OutputError.
void write_output(const std::string& path, const std::string& text);

}  // namespace abkit::cli
