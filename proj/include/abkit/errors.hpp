#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace abkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

// Numerical failure; carries the best value available when it gave up
// (an integral estimate, or the time an integrator reached).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what,
                          double best_estimate = std::numeric_limits<double>::quiet_NaN())
        : Error(what), best_estimate_(best_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

class SingularityError : public NumericError {
public:
    SingularityError(const std::string& what, double time)
        : NumericError(what, time), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class RegimeError : public Error {
public:
    RegimeError(const std::string& what, std::string ratio_name, double ratio)
        : Error(what), ratio_name_(std::move(ratio_name)), ratio_(ratio) {}

    const std::string& ratio_name() const noexcept { return ratio_name_; }
    double ratio() const noexcept { return ratio_; }

private:
    std::string ratio_name_;
    double ratio_;
};

}  // namespace abkit
