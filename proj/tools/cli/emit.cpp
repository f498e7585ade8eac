#include "cli/emit.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "json.hpp"

namespace abkit::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

bool has_parameter(const Report& r) {
    return !r.parameter.empty() ||
           std::any_of(r.rows.begin(), r.rows.end(), [](const Row& row) { return row.parameter_value.has_value(); });
}

ordered_json number_or_null(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

std::optional<double> optional_number(const ordered_json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string to_csv(const Report& report) {
    const bool param = has_parameter(report);
    std::string out = "quantity,value,units,error_estimate";
    if (param) out += ",parameter,parameter_value";
    out += "\r\n";
    for (const auto& r : report.rows) {
        out += csv_field(r.quantity) + ',' + format_number(r.value) + ',' + csv_field(r.units) + ',';
        if (r.error_estimate) out += format_number(*r.error_estimate);
        if (param) {
            out += ',' + csv_field(report.parameter) + ',';
            if (r.parameter_value) out += format_number(*r.parameter_value);
        }
        out += "\r\n";
    }
    return out;
}

std::string to_json(const Report& report) {
    ordered_json j;
    j["experiment"] = report.experiment;
    j["parameter"] = report.parameter.empty() ? ordered_json(nullptr) : ordered_json(report.parameter);
    j["rows"] = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["quantity"] = r.quantity;
        row["value"] = std::isfinite(r.value) ? ordered_json(r.value) : ordered_json(nullptr);
        row["units"] = r.units;
        row["error_estimate"] = number_or_null(r.error_estimate);
        row["parameter_value"] = number_or_null(r.parameter_value);
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    Report r;
    r.experiment = j.at("experiment").get<std::string>();
    if (!j.at("parameter").is_null()) r.parameter = j.at("parameter").get<std::string>();
    for (const auto& row : j.at("rows")) {
        Row out;
        out.quantity = row.at("quantity").get<std::string>();
        out.value = row.at("value").is_null() ? std::nan("") : row.at("value").get<double>();
        out.units = row.at("units").get<std::string>();
        out.error_estimate = optional_number(row.at("error_estimate"));
        out.parameter_value = optional_number(row.at("parameter_value"));
        r.rows.push_back(std::move(out));
    }
    return r;
}

std::string to_svg(const Report& report, bool log_x) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : report.rows)
        if (r.parameter_value && std::isfinite(r.value) && (!log_x || *r.parameter_value > 0.0))
            pts.emplace_back(log_x ? std::log10(*r.parameter_value) : *r.parameter_value, r.value);
    constexpr double width = 640, height = 400, left = 80, right = 20, top = 30, bottom = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!pts.empty()) {
        const auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end());
        x0 = xmin->first;
        x1 = xmax->first;
        const auto [ymin, ymax] = std::minmax_element(pts.begin(), pts.end(),
                                                      [](const auto& a, const auto& b) { return a.second < b.second; });
        y0 = ymin->second;
        y1 = ymax->second;
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) {
        const double pad = y0 == 0.0 ? 1.0 : 0.5 * std::abs(y0);
        y0 -= pad;
        y1 += pad;
    }
    // Screen coordinates rounded to 0.01 px.
    auto px = [](double v) { return std::round(v * 100.0) / 100.0; };
    auto sx = [&](double x) { return px(left + (x - x0) / (x1 - x0) * (width - left - right)); };
    auto sy = [&](double y) { return px(height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom)); };
    const std::string quantity = report.rows.empty() ? "" : report.rows.front().quantity;

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
    const std::string ax0 = format_number(left), ay0 = format_number(height - bottom);
    out += "<line x1=\"" + ax0 + "\" y1=\"" + ay0 + "\" x2=\"" + format_number(width - right) + "\" y2=\"" + ay0 +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + ax0 + "\" y1=\"" + ay0 + "\" x2=\"" + ax0 + "\" y2=\"" + format_number(top) +
           "\" stroke=\"black\"/>\n";
    out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ' ';
        out += format_number(sx(pts[i].first)) + ',' + format_number(sy(pts[i].second));
    }
    out += "\"/>\n";
    for (const auto& p : pts)
        out += "<circle cx=\"" + format_number(sx(p.first)) + "\" cy=\"" + format_number(sy(p.second)) +
               "\" r=\"3\" fill=\"steelblue\"/>\n";
    const std::string xlabel = (log_x ? "log10 " : "") + report.parameter;
    out += "<text x=\"360\" y=\"390\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(xlabel) + "</text>\n";
    out += "<text x=\"20\" y=\"200\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 200)\">" +
           xml_escape(quantity) + "</text>\n";
    out += "<text x=\"" + ax0 + "\" y=\"" + format_number(height - bottom + 18) + "\" font-size=\"11\">" +
           xml_escape(format_number(log_x ? std::pow(10.0, x0) : x0)) + "</text>\n";
    out += "<text x=\"" + format_number(width - right) + "\" y=\"" + format_number(height - bottom + 18) +
           "\" text-anchor=\"end\" font-size=\"11\">" + xml_escape(format_number(log_x ? std::pow(10.0, x1) : x1)) +
           "</text>\n";
    out += "<text x=\"" + format_number(left - 4) + "\" y=\"" + format_number(height - bottom) +
           "\" text-anchor=\"end\" font-size=\"11\">" + xml_escape(format_number(y0)) + "</text>\n";
    out += "<text x=\"" + format_number(left - 4) + "\" y=\"" + format_number(top + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + xml_escape(format_number(y1)) + "</text>\n";
    out += "</svg>\n";
    return out;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw OutputError("failed writing '" + path + "'");
}

}  // namespace abkit::cli
