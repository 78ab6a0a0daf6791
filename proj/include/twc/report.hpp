#pragma once

#include <cstdio>
#include <map>
#include <sstream>
#include <string>

namespace twc {

// One named check: deviation metrics against a pinned tolerance, plus the
// parameters that produced them. pass is max_deviation <= tolerance, or
// lhs <= rhs + tolerance for inequality-style checks.
struct VerificationReport {
    std::string check_name;
    std::map<std::string, std::string> parameters;
    std::map<std::string, double> metrics;
    double tolerance = 0.0;
    bool pass = false;
    double runtime_ms = 0.0;

    double metric(const std::string& key, double fallback = 0.0) const {
        auto it = metrics.find(key);
        return it == metrics.end() ? fallback : it->second;
    }
};

inline VerificationReport make_deviation_report(std::string name, double max_dev, double tol) {
    VerificationReport r;
    r.check_name = std::move(name);
    r.metrics["max_deviation"] = max_dev;
    r.tolerance = tol;
    r.pass = max_dev <= tol;
    return r;
}

// Deterministic JSON: keys in map order, doubles at 17 significant digits.
// Two runs with the same config produce byte-identical output apart from
// runtime_ms.
inline std::string report_to_json(const VerificationReport& r) {
    char num[40];
    auto fmt = [&](double v) {
        std::snprintf(num, sizeof num, "%.17g", v);
        return std::string(num);
    };
    std::ostringstream os;
    os << "{\n  \"check_name\": \"" << r.check_name << "\",\n  \"parameters\": {";
    bool first = true;
    for (const auto& [k, v] : r.parameters) {
        os << (first ? "" : ", ") << "\"" << k << "\": \"" << v << "\"";
        first = false;
    }
    os << "},\n  \"metrics\": {";
    first = true;
    for (const auto& [k, v] : r.metrics) {
        os << (first ? "" : ", ") << "\"" << k << "\": " << fmt(v);
        first = false;
    }
    os << "},\n  \"tolerance\": " << fmt(r.tolerance) << ",\n  \"pass\": "
       << (r.pass ? "true" : "false") << ",\n  \"runtime_ms\": " << fmt(r.runtime_ms) << "\n}\n";
    return os.str();
}

} // namespace twc
