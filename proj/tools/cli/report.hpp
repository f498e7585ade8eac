#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace abkit::cli {

struct Row {
    std::string quantity;
    double value = 0.0;
    std::string units;
    std::optional<double> error_estimate;
    std::optional<double> parameter_value;  // sweeps and fraction scans

    bool operator==(const Row&) const = default;
};

struct Report {
    std::string experiment;
    std::string parameter;  // swept key, empty when none
    std::vector<Row> rows;

    bool operator==(const Report&) const = default;
};

// Failure of a named computation step (exit status 3).
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(std::string check, const std::string& what)
        : std::runtime_error(what), check_(std::move(check)) {}
    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

// Output that could not be written (exit status 4).
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace abkit::cli
