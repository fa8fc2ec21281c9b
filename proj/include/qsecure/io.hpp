#pragma once

// JSON documents, angle literals and CSV output for the command-line tool.
//
//   behavior:   {"scenario": {"N": 2, "M": 2, "K": 2}, "p": [...]}
//   functional: {"scenario": {...}, "c": [...], "label": "..."}
//   table:      {"M": 2, "c": [[...], [...]]}

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsecure/behavior.hpp"
#include "qsecure/cert222.hpp"
#include "qsecure/error.hpp"
#include "qsecure/numkernel.hpp"

namespace qsecure::io {

using json = nlohmann::json;

[[noreturn]] inline void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        parse_error(e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) parse_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json load_json(const std::string& path) { return parse_json(read_file(path)); }

inline json to_json(const Scenario& sc) { return {{"N", sc.parties}, {"M", sc.settings}, {"K", sc.outcomes}}; }

inline Scenario scenario_from_json(const json& j) {
    try {
        Scenario sc{j.at("N").get<std::size_t>(), j.at("M").get<std::size_t>(), j.at("K").get<std::size_t>()};
        sc.check();
        return sc;
    } catch (const json::exception& e) {
        parse_error(std::string("scenario: ") + e.what());
    }
}

inline std::vector<double> number_array(const json& j, const char* what) {
    if (!j.is_array()) parse_error(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) parse_error(std::string(what) + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline json to_json(const Behavior& b) { return {{"scenario", to_json(b.scenario)}, {"p", b.p}}; }

inline Behavior behavior_from_json(const json& j) {
    if (!j.is_object() || !j.contains("scenario") || !j.contains("p")) parse_error("behavior needs scenario and p");
    const Scenario sc = scenario_from_json(j.at("scenario"));
    auto p = number_array(j.at("p"), "p");
    if (p.size() != sc.table_size()) parse_error("p has the wrong length for the scenario");
    return Behavior(sc, std::move(p));
}

inline json to_json(const BellFunctional& f) {
    return {{"scenario", to_json(f.scenario)}, {"c", f.c}, {"label", f.label}};
}

inline BellFunctional functional_from_json(const json& j) {
    if (!j.is_object() || !j.contains("scenario") || !j.contains("c")) parse_error("functional needs scenario and c");
    const Scenario sc = scenario_from_json(j.at("scenario"));
    auto c = number_array(j.at("c"), "c");
    if (c.size() != sc.table_size()) parse_error("c has the wrong length for the scenario");
    for (double v : c)
        if (!std::isfinite(v)) parse_error("c must be finite");
    return BellFunctional(sc, std::move(c), j.value("label", std::string("functional")));
}

inline json to_json(const RealMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

inline RealMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) parse_error("matrix must be a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    RealMatrix m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto row = number_array(j[i], "matrix row");
        if (row.size() != cols) parse_error("matrix rows differ in length");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = row[k];
    }
    return m;
}

inline json table_to_json(const RealMatrix& c) { return {{"M", c.rows()}, {"c", to_json(c)}}; }

inline RealMatrix table_from_json(const json& j) {
    if (!j.is_object() || !j.contains("c")) parse_error("table needs c");
    RealMatrix c = matrix_from_json(j.at("c"));
    if (j.contains("M") && j.at("M").get<std::size_t>() != c.rows()) parse_error("M disagrees with c");
    if (!c.square()) parse_error("c must be M x M");
    return c;
}

/// Radians: decimals, "pi", "pi/8", "3pi/4", "3*pi/4", "-pi/2", "0.5*pi".
inline double parse_angle(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s.empty()) parse_error("empty angle");

    auto number = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            parse_error("bad angle '" + text + "'");
        }
        if (used != t.size()) parse_error("bad angle '" + text + "'");
        return v;
    };

    const auto at = s.find("pi");
    if (at == std::string::npos) return number(s);

    std::string head = s.substr(0, at), tail = s.substr(at + 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    double mul = 1.0;
    if (head == "-") mul = -1.0;
    else if (head == "+") mul = 1.0;
    else if (!head.empty()) mul = number(head);

    double div = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/') parse_error("bad angle '" + text + "'");
        div = number(tail.substr(1));
        if (div == 0.0) parse_error("division by zero in angle");
    }
    return mul * std::numbers::pi / div;
}

inline std::vector<double> parse_angle_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_angle(item));
    if (out.empty()) parse_error("empty angle list");
    return out;
}

inline Sign parse_sign(const std::string& s) {
    if (s == "plus" || s == "+") return Sign::Plus;
    if (s == "minus" || s == "-") return Sign::Minus;
    parse_error("sign must be plus or minus");
}

inline void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
    out << "x,theta_B,applicable,quantum_bound,classical_max,ratio\n";
    out << std::setprecision(12);
    for (const auto& r : rows) {
        out << r.x << ',' << r.theta_b << ',' << (r.applicable ? "true" : "false") << ',';
        if (r.applicable) out << r.quantum_bound << ',' << r.classical_max << ',' << r.ratio;
        else out << ",,";
        out << '\n';
    }
}

} // namespace qsecure::io
