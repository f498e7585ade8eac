#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abkit/quadrature.hpp"
#include "abkit/units.hpp"

namespace abkit::cli {

// Rejected configuration. Line and column are 1-based; 0 means the error is
// not tied to a position in the file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(what), line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

enum class Experiment { Magnetic, Electric, Visibility, Verify, Sweep };

Experiment parse_experiment(std::string_view name);
std::string_view to_string(Experiment e);

// Physical dimension of a configuration value.
enum class Dim { None, Length, Area, Mass, Time, Velocity, Charge, SurfaceChargeDensity };

enum class Kind { Number, Count, Choice, Flag, NumberList, Text };

struct KeySpec {
    std::string_view section;
    std::string_view key;
    Kind kind;
    Dim dim = Dim::None;
    std::string_view choices = {};  // '|'-separated, for Kind::Choice
};

// Every accepted key.
const std::vector<KeySpec>& key_table();
const KeySpec* find_key(std::string_view section, std::string_view key);

// Unit system used for the computation. CGS runs accept CGS and SI
// suffixes; natural runs take the suffix `nat` with hbar = 1.
enum class InputSystem { Cgs, Natural };

struct Entry {
    const KeySpec* spec = nullptr;
    std::string text;
    int line = 0;
    int column = 0;  // column of the value
    double number = 0.0;  // converted to the run's units
    std::vector<double> list;
};

class RunConfig {
public:
    // Parses INI text. `experiment` selects the default unit system;
    // `env_tol` is the default relative quadrature tolerance.
    static RunConfig parse(std::string_view text, Experiment experiment, std::optional<double> env_tol = {});
    static RunConfig load(const std::string& path, Experiment experiment, std::optional<double> env_tol = {});

    InputSystem system() const noexcept { return system_; }
    // Gaussian constants for the magnetic model.
    units::UnitSystem gaussian_units() const;
    // Rationalized constants for the electric model (natural only).
    units::UnitSystem rationalized_units() const;
    // Unit label of a dimension in the run's system.
    std::string unit_label(Dim dim) const;

    bool has(std::string_view section, std::string_view key) const;
    const Entry* entry(std::string_view section, std::string_view key) const;
    // Value in run units, or `fallback` when the key is absent.
    double number(std::string_view section, std::string_view key, double fallback) const;
    std::size_t count(std::string_view section, std::string_view key, std::size_t fallback) const;
    std::string choice(std::string_view section, std::string_view key, std::string_view fallback) const;
    std::string text(std::string_view section, std::string_view key, std::string_view fallback) const;
    bool flag(std::string_view section, std::string_view key, bool fallback) const;
    std::vector<double> list(std::string_view section, std::string_view key, std::vector<double> fallback) const;

    // Replaces a numeric value (already in run units), for sweeps.
    void set_number(std::string_view section, std::string_view key, double value);

    // Parses `text` as a value of `spec` in the run's units.
    double parse_number(const KeySpec& spec, std::string_view text, int line, int column) const;

    numerics::QuadOptions quad() const { return quad_; }

private:
    using Key = std::pair<std::string, std::string>;
    std::map<Key, Entry> entries_;
    InputSystem system_ = InputSystem::Cgs;
    double c_ = 1.0, e_ = 1.0, m_ = 1.0;  // natural constants
    numerics::QuadOptions quad_{};

    void resolve(Experiment experiment, std::optional<double> env_tol);
};

}  // namespace abkit::cli
