#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/report.hpp"

namespace abkit::cli {

struct CheckOutcome {
    std::string name;
    double value = 0.0;      // measured discrepancy
    double tolerance = 0.0;  // pass threshold
    bool passed = false;
    std::string message;     // failure detail
};

struct RunResult {
    Report report;
    std::vector<std::string> warnings;
    std::vector<CheckOutcome> checks;  // verify only

    bool all_passed() const;
};

struct RunOverrides {
    std::optional<std::string> scenario;  // electric: fixed, free or split
    unsigned threads = 0;                 // model threads, 0 = configured
};

// Runs one experiment. Throws ConfigError for rejected inputs and
// NumericFailure for failed computations.
RunResult run(const RunConfig& config, Experiment experiment, const RunOverrides& overrides = {});

// Points of the configured sweep in run units, ascending.
std::vector<double> sweep_points(const RunConfig& config);

}  // namespace abkit::cli
