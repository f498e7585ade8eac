#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace abkit::cli {

namespace {

using units::Quantity;
using units::System;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
}

bool valid_name(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_name_char); }

struct UnitToken {
    std::string_view token;
    Dim dim;
    bool si;
    double scale;
};

constexpr UnitToken unit_tokens[] = {
    {"cm", Dim::Length, false, 1.0},          {"m", Dim::Length, true, 1.0},
    {"mm", Dim::Length, true, 1e-3},          {"km", Dim::Length, true, 1e3},
    {"cm^2", Dim::Area, false, 1.0},          {"m^2", Dim::Area, true, 1.0},
    {"mm^2", Dim::Area, true, 1e-6},          {"g", Dim::Mass, false, 1.0},
    {"kg", Dim::Mass, true, 1.0},             {"s", Dim::Time, false, 1.0},
    {"ms", Dim::Time, false, 1e-3},           {"cm/s", Dim::Velocity, false, 1.0},
    {"m/s", Dim::Velocity, true, 1.0},        {"statC", Dim::Charge, false, 1.0},
    {"C", Dim::Charge, true, 1.0},            {"statC/cm^2", Dim::SurfaceChargeDensity, false, 1.0},
    {"C/m^2", Dim::SurfaceChargeDensity, true, 1.0},
};

Quantity quantity_of(Dim d) {
    switch (d) {
        case Dim::Length: return Quantity::Length;
        case Dim::Mass: return Quantity::Mass;
        case Dim::Time: return Quantity::Time;
        case Dim::Velocity: return Quantity::Velocity;
        case Dim::Charge: return Quantity::Charge;
        case Dim::SurfaceChargeDensity: return Quantity::SurfaceChargeDensity;
        default: return Quantity::Length;
    }
}

double si_to_cgs(double v, Dim d) {
    if (d == Dim::Area) {
        const double f = units::convert(1.0, Quantity::Length, System::RationalizedMks, System::CgsGaussian);
        return v * f * f;
    }
    return units::convert(v, quantity_of(d), System::RationalizedMks, System::CgsGaussian);
}

std::string_view dim_name(Dim d) {
    switch (d) {
        case Dim::None: return "dimensionless";
        case Dim::Length: return "length";
        case Dim::Area: return "area";
        case Dim::Mass: return "mass";
        case Dim::Time: return "time";
        case Dim::Velocity: return "velocity";
        case Dim::Charge: return "charge";
        case Dim::SurfaceChargeDensity: return "surface charge density";
    }
    return "";
}

std::vector<std::string_view> split_choices(std::string_view c) {
    std::vector<std::string_view> out;
    while (!c.empty()) {
        const auto bar = c.find('|');
        out.push_back(c.substr(0, bar));
        if (bar == std::string_view::npos) break;
        c.remove_prefix(bar + 1);
    }
    return out;
}

// Value text up to an inline comment, which starts at '#' or ';' preceded
// by whitespace. Quoted text may contain either character.
std::string_view strip_comment(std::string_view v) {
    bool quoted = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == '"') quoted = !quoted;
        if (!quoted && (v[i] == '#' || v[i] == ';') && (i == 0 || v[i - 1] == ' ' || v[i - 1] == '\t'))
            return v.substr(0, i);
    }
    return v;
}

struct RawEntry {
    std::string section;
    std::string key;
    std::string value;
    int line;
    int key_column;
    int value_column;
};

}  // namespace

Experiment parse_experiment(std::string_view name) {
    if (name == "magnetic") return Experiment::Magnetic;
    if (name == "electric") return Experiment::Electric;
    if (name == "visibility") return Experiment::Visibility;
    if (name == "verify") return Experiment::Verify;
    if (name == "sweep") return Experiment::Sweep;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::Magnetic: return "magnetic";
        case Experiment::Electric: return "electric";
        case Experiment::Visibility: return "visibility";
        case Experiment::Verify: return "verify";
        case Experiment::Sweep: return "sweep";
    }
    return "";
}

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table{
        {"units", "system", Kind::Choice, Dim::None, "cgs|natural"},
        {"units", "c", Kind::Number},
        {"units", "e_charge", Kind::Number},
        {"units", "m_electron", Kind::Number},
        {"tolerance", "quad_rel", Kind::Number},
        {"tolerance", "quad_abs", Kind::Number},
        {"tolerance", "max_intervals", Kind::Count},
        {"tolerance", "recombination_tol", Kind::Number},
        {"solenoid", "a", Kind::Number, Dim::Length},
        {"solenoid", "R", Kind::Number, Dim::Length},
        {"solenoid", "L", Kind::Number, Dim::Length},
        {"solenoid", "L_over_R", Kind::Number},
        {"solenoid", "v0", Kind::Number, Dim::Velocity},
        {"solenoid", "u", Kind::Number, Dim::Velocity},
        {"solenoid", "Q", Kind::Number, Dim::Charge},
        {"solenoid", "target_phase", Kind::Number},
        {"solenoid", "M", Kind::Number, Dim::Mass},
        {"solenoid", "n_a", Kind::Count},
        {"solenoid", "n_L", Kind::Count},
        {"solenoid", "e", Kind::Number, Dim::Charge},
        {"magnetic", "gauge", Kind::Choice, Dim::None, "lorenz|coulomb"},
        {"magnetic", "mode", Kind::Choice, Dim::None, "continuum|discrete"},
        {"magnetic", "signs", Kind::Choice, Dim::None, "positive|negative|both"},
        {"magnetic", "extrapolate", Kind::Flag},
        {"magnetic", "budget", Kind::Flag},
        {"magnetic", "threads", Kind::Count},
        {"visibility", "constraint_margin", Kind::Number},
        {"capacitor", "sigma_s", Kind::Number, Dim::SurfaceChargeDensity},
        {"capacitor", "area", Kind::Number, Dim::Area},
        {"capacitor", "D", Kind::Number, Dim::Length},
        {"capacitor", "M", Kind::Number, Dim::Mass},
        {"capacitor", "m", Kind::Number, Dim::Mass},
        {"capacitor", "e", Kind::Number, Dim::Charge},
        {"capacitor", "u", Kind::Number, Dim::Velocity},
        {"capacitor", "T", Kind::Number, Dim::Time},
        {"capacitor", "v0", Kind::Number, Dim::Velocity},
        {"capacitor", "ramp_time", Kind::Number, Dim::Time},
        {"capacitor", "max_displacement_ratio", Kind::Number},
        {"electric", "scenario", Kind::Choice, Dim::None, "fixed|free|split"},
        {"electric", "exact", Kind::Flag},
        {"electric", "fractions", Kind::NumberList},
        {"sweep", "experiment", Kind::Choice, Dim::None, "magnetic|electric|visibility"},
        {"sweep", "parameter", Kind::Text},
        {"sweep", "from", Kind::Text},
        {"sweep", "to", Kind::Text},
        {"sweep", "count", Kind::Count},
        {"sweep", "scale", Kind::Choice, Dim::None, "linear|log"},
        {"sweep", "quantity", Kind::Text},
        {"sweep", "threads", Kind::Count},
        {"verify", "samples", Kind::Count},
        {"verify", "packet_samples", Kind::Count},
        {"verify", "seed", Kind::Count},
        {"output", "format", Kind::Choice, Dim::None, "csv|json"},
        {"output", "path", Kind::Text},
        {"output", "svg", Kind::Text},
    };
    return table;
}

const KeySpec* find_key(std::string_view section, std::string_view key) {
    for (const auto& k : key_table())
        if (k.section == section && k.key == key) return &k;
    return nullptr;
}

RunConfig RunConfig::load(const std::string& path, Experiment experiment, std::optional<double> env_tol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), experiment, env_tol);
}

RunConfig RunConfig::parse(std::string_view text, Experiment experiment, std::optional<double> env_tol) {
    RunConfig cfg;
    std::vector<RawEntry> raw;
    std::string section;
    bool have_section = false;
    int line_no = 0;
    std::vector<std::string> seen_sections;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        const auto body = trim(line);
        if (body.empty() || body.front() == '#' || body.front() == ';') continue;
        const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (body.front() == '[') {
            const auto close = body.find(']');
            if (close == std::string_view::npos)
                throw ConfigError("section header is missing ']'", line_no, indent);
            const auto rest = trim(strip_comment(body.substr(close + 1)));
            if (!rest.empty())
                throw ConfigError("unexpected text after section header", line_no,
                                  indent + static_cast<int>(close) + 1);
            const auto name = trim(body.substr(1, close - 1));
            const bool known = std::any_of(key_table().begin(), key_table().end(),
                                           [&](const KeySpec& k) { return k.section == name; });
            if (!known) throw ConfigError("unknown section '" + std::string(name) + "'", line_no, indent + 1);
            if (std::find(seen_sections.begin(), seen_sections.end(), name) != seen_sections.end())
                throw ConfigError("section '" + std::string(name) + "' appears twice", line_no, indent + 1);
            seen_sections.emplace_back(name);
            section = std::string(name);
            have_section = true;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no, indent);
        const auto key = trim(body.substr(0, eq));
        if (!valid_name(key)) throw ConfigError("invalid key name", line_no, indent);
        if (!have_section) throw ConfigError("key outside of any section", line_no, indent);
        if (!find_key(section, key))
            throw ConfigError("unknown key '" + std::string(key) + "' in section [" + section + "]", line_no, indent);
        const auto after = body.substr(eq + 1);
        const auto value = trim(strip_comment(after));
        const auto lead = after.find_first_not_of(" \t");
        const int value_col = indent + static_cast<int>(eq) + 1 + static_cast<int>(lead == std::string_view::npos ? 0 : lead);
        if (value.empty()) throw ConfigError("missing value for '" + std::string(key) + "'", line_no, value_col);
        for (const auto& r : raw)
            if (r.section == section && r.key == key)
                throw ConfigError("duplicate key '" + std::string(key) + "' (first set on line " +
                                      std::to_string(r.line) + ")",
                                  line_no, indent);
        raw.push_back({section, std::string(key), std::string(value), line_no, indent, value_col});
    }

    // The unit system decides how every other value is read.
    auto find_raw = [&](std::string_view s, std::string_view k) -> const RawEntry* {
        for (const auto& r : raw)
            if (r.section == s && r.key == k) return &r;
        return nullptr;
    };
    Experiment unit_experiment = experiment;
    if (experiment == Experiment::Sweep) {
        if (const auto* r = find_raw("sweep", "experiment")) {
            const auto choices = split_choices(find_key("sweep", "experiment")->choices);
            if (std::find(choices.begin(), choices.end(), r->value) == choices.end())
                throw ConfigError("sweep experiment must be one of magnetic|electric|visibility", r->line,
                                  r->value_column);
            unit_experiment = parse_experiment(r->value);
        }
    }
    cfg.system_ = unit_experiment == Experiment::Electric ? InputSystem::Natural : InputSystem::Cgs;
    if (const auto* r = find_raw("units", "system")) {
        if (r->value == "cgs")
            cfg.system_ = InputSystem::Cgs;
        else if (r->value == "natural")
            cfg.system_ = InputSystem::Natural;
        else
            throw ConfigError("unit system must be cgs or natural", r->line, r->value_column);
    }
    if (unit_experiment == Experiment::Electric && cfg.system_ != InputSystem::Natural) {
        const auto* r = find_raw("units", "system");
        throw ConfigError("the electric experiment runs in rationalized natural units; set [units] system = natural",
                          r ? r->line : 0, r ? r->value_column : 0);
    }

    // Natural constants first: charges in units of `e` depend on them.
    for (const char* k : {"c", "e_charge", "m_electron"}) {
        if (const auto* r = find_raw("units", k)) {
            if (cfg.system_ != InputSystem::Natural)
                throw ConfigError(std::string("[units] ") + k + " applies to the natural system only", r->line,
                                  r->key_column);
            const double v = cfg.parse_number(*find_key("units", k), r->value, r->line, r->value_column);
            if (!(v > 0.0)) throw ConfigError(std::string(k) + " must be positive", r->line, r->value_column);
            (std::string_view(k) == "c" ? cfg.c_ : std::string_view(k) == "e_charge" ? cfg.e_ : cfg.m_) = v;
        }
    }

    for (const auto& r : raw) {
        const KeySpec* spec = find_key(r.section, r.key);
        Entry e;
        e.spec = spec;
        e.text = r.value;
        e.line = r.line;
        e.column = r.value_column;
        switch (spec->kind) {
            case Kind::Number:
                e.number = cfg.parse_number(*spec, r.value, r.line, r.value_column);
                break;
            case Kind::Count: {
                std::size_t n = 0;
                const auto* end = r.value.data() + r.value.size();
                const auto res = std::from_chars(r.value.data(), end, n);
                if (res.ec != std::errc{} || res.ptr != end)
                    throw ConfigError("expected a non-negative integer", r.line, r.value_column);
                e.number = static_cast<double>(n);
                break;
            }
            case Kind::Choice: {
                const auto choices = split_choices(spec->choices);
                if (std::find(choices.begin(), choices.end(), r.value) == choices.end())
                    throw ConfigError("'" + r.value + "' is not one of " + std::string(spec->choices), r.line,
                                      r.value_column);
                break;
            }
            case Kind::Flag:
                if (r.value != "true" && r.value != "false")
                    throw ConfigError("expected true or false", r.line, r.value_column);
                e.number = r.value == "true" ? 1.0 : 0.0;
                break;
            case Kind::NumberList: {
                std::string_view rest = r.value;
                int col = r.value_column;
                while (true) {
                    const auto comma = rest.find(',');
                    const auto item = rest.substr(0, comma);
                    const auto lead = item.find_first_not_of(" \t");
                    const auto t = trim(item);
                    if (t.empty()) throw ConfigError("empty list item", r.line, col);
                    e.list.push_back(cfg.parse_number(*spec, t, r.line,
                                                      col + static_cast<int>(lead == std::string_view::npos ? 0 : lead)));
                    if (comma == std::string_view::npos) break;
                    col += static_cast<int>(comma) + 1;
                    rest.remove_prefix(comma + 1);
                }
                break;
            }
            case Kind::Text:
                if (e.text.size() >= 2 && e.text.front() == '"' && e.text.back() == '"')
                    e.text = e.text.substr(1, e.text.size() - 2);
                break;
        }
        cfg.entries_.emplace(Key{r.section, r.key}, std::move(e));
    }
    cfg.resolve(experiment, env_tol);
    return cfg;
}

double RunConfig::parse_number(const KeySpec& spec, std::string_view text, int line, int column) const {
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr == text.data()) throw ConfigError("expected a number", line, column);
    if (!std::isfinite(v)) throw ConfigError("value must be finite", line, column);
    const auto unit_offset = static_cast<int>(res.ptr - text.data());
    const auto unit = trim(std::string_view(res.ptr, static_cast<std::size_t>(end - res.ptr)));
    const int unit_col = column + unit_offset + static_cast<int>(std::string_view(res.ptr, end - res.ptr).find_first_not_of(" \t"));

    if (spec.dim == Dim::None) {
        if (unit.empty() || unit == "rad") return v;
        throw ConfigError("'" + std::string(spec.key) + "' is dimensionless; unexpected unit '" + std::string(unit) + "'",
                          line, unit_col);
    }
    if (unit.empty())
        throw ConfigError("'" + std::string(spec.key) + "' needs a unit suffix (" + std::string(dim_name(spec.dim)) + ")",
                          line, column + unit_offset);
    if (spec.dim == Dim::Charge && unit == "e")
        return v * (system_ == InputSystem::Natural ? e_ : units::UnitSystem::cgs().e_charge);
    if (system_ == InputSystem::Natural) {
        if (unit == "nat") return v;
        throw ConfigError("natural units take the suffix 'nat', not '" + std::string(unit) + "'", line, unit_col);
    }
    if (unit == "nat") throw ConfigError("suffix 'nat' needs [units] system = natural", line, unit_col);
    for (const auto& t : unit_tokens) {
        if (t.token != unit) continue;
        if (t.dim != spec.dim)
            throw ConfigError("unit '" + std::string(unit) + "' is not a " + std::string(dim_name(spec.dim)), line,
                              unit_col);
        return t.si ? si_to_cgs(v * t.scale, t.dim) : v * t.scale;
    }
    throw ConfigError("unknown unit '" + std::string(unit) + "'", line, unit_col);
}

void RunConfig::resolve(Experiment experiment, std::optional<double> env_tol) {
    quad_.rel_tol = env_tol.value_or(quad_.rel_tol);
    if (const auto* e = entry("tolerance", "quad_rel")) {
        if (!(e->number > 0.0)) throw ConfigError("quad_rel must be positive", e->line, e->column);
        quad_.rel_tol = e->number;
    }
    if (const auto* e = entry("tolerance", "quad_abs")) {
        if (!(e->number >= 0.0)) throw ConfigError("quad_abs must be non-negative", e->line, e->column);
        quad_.abs_tol = e->number;
    }
    if (const auto* e = entry("tolerance", "max_intervals")) {
        if (e->number < 1) throw ConfigError("max_intervals must be at least 1", e->line, e->column);
        quad_.max_intervals = static_cast<std::size_t>(e->number);
    }
    for (const auto& [k1, k2] : {std::pair{"solenoid", "L"}, std::pair{"solenoid", "Q"}}) {
        const char* other = std::string_view(k2) == "L" ? "L_over_R" : "target_phase";
        const auto* a = entry(k1, k2);
        if (a && has(k1, other))
            throw ConfigError(std::string("set either ") + k2 + " or " + other + ", not both", a->line, a->column);
    }

    if (experiment != Experiment::Sweep) return;
    const auto* param = entry("sweep", "parameter");
    if (!param) throw ConfigError("[sweep] needs a parameter");
    const auto dot = param->text.find('.');
    const KeySpec* target =
        dot == std::string::npos ? nullptr : find_key(param->text.substr(0, dot), param->text.substr(dot + 1));
    if (!target || target->kind != Kind::Number || target->section == "units" || target->section == "tolerance")
        throw ConfigError("sweep parameter must name a numeric model key such as solenoid.L_over_R", param->line,
                          param->column);
    const auto* from = entry("sweep", "from");
    const auto* to = entry("sweep", "to");
    if (!from || !to) throw ConfigError("[sweep] needs from and to", param->line, param->column);
    const double lo = parse_number(*target, from->text, from->line, from->column);
    const double hi = parse_number(*target, to->text, to->line, to->column);
    const auto* count = entry("sweep", "count");
    const std::size_t n = count ? static_cast<std::size_t>(count->number) : 7;
    if (!(lo < hi) || n < 2)
        throw ConfigError("empty sweep range: need from < to and count >= 2", from->line, from->column);
    if (choice("sweep", "scale", "linear") == "log" && !(lo > 0.0))
        throw ConfigError("a log sweep needs a positive start", from->line, from->column);
}

units::UnitSystem RunConfig::gaussian_units() const {
    if (system_ == InputSystem::Cgs) return units::UnitSystem::cgs();
    return units::UnitSystem::natural(System::CgsGaussian, c_, e_, m_);
}

units::UnitSystem RunConfig::rationalized_units() const {
    return units::UnitSystem::natural(System::RationalizedMks, c_, e_, m_);
}

std::string RunConfig::unit_label(Dim dim) const {
    if (dim == Dim::None) return "";
    if (system_ == InputSystem::Natural) return "nat";
    switch (dim) {
        case Dim::Length: return "cm";
        case Dim::Area: return "cm^2";
        case Dim::Mass: return "g";
        case Dim::Time: return "s";
        case Dim::Velocity: return "cm/s";
        case Dim::Charge: return "statC";
        case Dim::SurfaceChargeDensity: return "statC/cm^2";
        default: return "";
    }
}

bool RunConfig::has(std::string_view section, std::string_view key) const { return entry(section, key) != nullptr; }

const Entry* RunConfig::entry(std::string_view section, std::string_view key) const {
    const auto it = entries_.find(Key{std::string(section), std::string(key)});
    return it == entries_.end() ? nullptr : &it->second;
}

double RunConfig::number(std::string_view section, std::string_view key, double fallback) const {
    if (const auto* e = entry(section, key)) return e->number;
    return fallback;
}

std::size_t RunConfig::count(std::string_view section, std::string_view key, std::size_t fallback) const {
    if (const auto* e = entry(section, key)) return static_cast<std::size_t>(e->number);
    return fallback;
}

std::string RunConfig::choice(std::string_view section, std::string_view key, std::string_view fallback) const {
    if (const auto* e = entry(section, key)) return e->text;
    return std::string(fallback);
}

std::string RunConfig::text(std::string_view section, std::string_view key, std::string_view fallback) const {
    return choice(section, key, fallback);
}

bool RunConfig::flag(std::string_view section, std::string_view key, bool fallback) const {
    if (const auto* e = entry(section, key)) return e->number != 0.0;
    return fallback;
}

std::vector<double> RunConfig::list(std::string_view section, std::string_view key,
                                    std::vector<double> fallback) const {
    if (const auto* e = entry(section, key)) return e->list;
    return fallback;
}

void RunConfig::set_number(std::string_view section, std::string_view key, double value) {
    auto& e = entries_[Key{std::string(section), std::string(key)}];
    e.spec = find_key(section, key);
    e.number = value;
    // A swept value replaces its alternative form.
    if (section == "solenoid" && key == "L_over_R") entries_.erase(Key{"solenoid", "L"});
    if (section == "solenoid" && key == "L") entries_.erase(Key{"solenoid", "L_over_R"});
    if (section == "solenoid" && key == "Q") entries_.erase(Key{"solenoid", "target_phase"});
    if (section == "solenoid" && key == "target_phase") entries_.erase(Key{"solenoid", "Q"});
}

}  // namespace abkit::cli
