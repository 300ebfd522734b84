#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksv {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Scientific notation with 3 significant digits.
inline std::string format_residual(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

struct CheckRecord {
    std::string id;
    nlohmann::json parameters = nlohmann::json::object();
    bool pass = false;
    bool exact = false;               ///< exact equality check; residual is then absent
    std::optional<double> residual;   ///< worst relative residual over samples
    double tolerance = 0;
    std::vector<double> samples;      ///< per-sample residuals
    std::string witness;              ///< first failing sample or certificate
    double runtime = 0;
};

struct VerificationReport {
    std::string version = kToolkitVersion;
    std::uint64_t seed = 0;
    int digits = 0;
    std::vector<CheckRecord> checks;
    bool timing = false;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
    }
    void sort() {
        std::sort(checks.begin(), checks.end(), [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
    }
};

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["toolkit_version"] = r.version;
    j["seed"] = r.seed;
    j["digits"] = r.digits;
    auto checks = nlohmann::ordered_json::array();
    std::size_t passed = 0;
    for (const auto& c : r.checks) {
        nlohmann::ordered_json e;
        e["id"] = c.id;
        e["status"] = c.pass ? "PASS" : "FAIL";
        e["parameters"] = c.parameters;
        e["exact"] = c.exact;
        e["residual"] = c.residual ? nlohmann::ordered_json(format_residual(*c.residual)) : nlohmann::ordered_json(nullptr);
        e["tolerance"] = c.exact ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(format_residual(c.tolerance));
        auto s = nlohmann::ordered_json::array();
        for (double v : c.samples) s.push_back(format_residual(v));
        e["samples"] = s;
        if (!c.witness.empty()) e["witness"] = c.witness;
        if (r.timing) e["runtime_s"] = format_residual(c.runtime);
        checks.push_back(e);
        passed += c.pass;
    }
    j["checks"] = checks;
    j["summary"] = {{"total", r.checks.size()}, {"passed", passed}, {"failed", r.checks.size() - passed}};
    return j;
}

inline std::string to_json_string(const VerificationReport& r) { return to_json(r).dump(2) + "\n"; }

/// Structural validation of a serialized report; returns the first problem found.
inline std::optional<std::string> validate_report_json(const nlohmann::json& j) {
    auto need = [&](const nlohmann::json& o, const char* key, bool (nlohmann::json::*pred)() const noexcept,
                    const std::string& where) -> std::optional<std::string> {
        if (!o.is_object() || !o.contains(key)) return where + ": missing " + key;
        if (!(o.at(key).*pred)()) return where + ": wrong type for " + key;
        return std::nullopt;
    };
    if (auto e = need(j, "toolkit_version", &nlohmann::json::is_string, "report")) return e;
    if (auto e = need(j, "seed", &nlohmann::json::is_number_unsigned, "report")) return e;
    if (auto e = need(j, "digits", &nlohmann::json::is_number_integer, "report")) return e;
    if (auto e = need(j, "checks", &nlohmann::json::is_array, "report")) return e;
    if (auto e = need(j, "summary", &nlohmann::json::is_object, "report")) return e;
    std::size_t passed = 0;
    for (std::size_t i = 0; i < j["checks"].size(); ++i) {
        const auto& c = j["checks"][i];
        std::string w = "checks[" + std::to_string(i) + "]";
        if (auto e = need(c, "id", &nlohmann::json::is_string, w)) return e;
        if (auto e = need(c, "status", &nlohmann::json::is_string, w)) return e;
        if (auto e = need(c, "parameters", &nlohmann::json::is_object, w)) return e;
        if (auto e = need(c, "exact", &nlohmann::json::is_boolean, w)) return e;
        if (auto e = need(c, "samples", &nlohmann::json::is_array, w)) return e;
        if (!c.contains("residual") || !(c["residual"].is_null() || c["residual"].is_string())) return w + ": bad residual";
        std::string st = c["status"];
        if (st != "PASS" && st != "FAIL") return w + ": status must be PASS or FAIL";
        passed += st == "PASS";
        if (i > 0 && j["checks"][i - 1]["id"].get<std::string>() >= c["id"].get<std::string>())
            return w + ": checks not sorted by id or duplicated";
    }
    const auto& s = j["summary"];
    if (s.value("total", std::size_t(-1)) != j["checks"].size() || s.value("passed", std::size_t(-1)) != passed)
        return std::string("summary: counts disagree with checks");
    return std::nullopt;
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
    if (auto e = validate_report_json(j)) throw std::runtime_error("invalid report: " + *e);
    VerificationReport r;
    r.version = j["toolkit_version"];
    r.seed = j["seed"];
    r.digits = j["digits"];
    for (const auto& c : j["checks"]) {
        CheckRecord rec;
        rec.id = c["id"];
        rec.pass = c["status"] == "PASS";
        rec.parameters = c["parameters"];
        rec.exact = c["exact"];
        if (c["residual"].is_string()) rec.residual = std::stod(c["residual"].get<std::string>());
        if (c.contains("tolerance") && c["tolerance"].is_string()) rec.tolerance = std::stod(c["tolerance"].get<std::string>());
        for (const auto& s : c["samples"]) rec.samples.push_back(std::stod(s.get<std::string>()));
        rec.witness = c.value("witness", std::string());
        if (c.contains("runtime_s")) {
            r.timing = true;
            rec.runtime = std::stod(c["runtime_s"].get<std::string>());
        }
        r.checks.push_back(rec);
    }
    return r;
}

/// Plain table: check id, status, max residual.
inline std::string to_text_table(const VerificationReport& r) {
    std::size_t w = 8;
    for (const auto& c : r.checks) w = std::max(w, c.id.size());
    std::ostringstream out;
    auto row = [&](const std::string& a, const std::string& b, const std::string& c) {
        out << a << std::string(w - a.size() + 2, ' ') << b << std::string(b.size() < 8 ? 8 - b.size() : 1, ' ') << c << "\n";
    };
    row("check", "status", "max residual");
    for (const auto& c : r.checks) row(c.id, c.pass ? "PASS" : "FAIL", c.exact ? "exact" : c.residual ? format_residual(*c.residual) : "-");
    std::size_t passed = std::count_if(r.checks.begin(), r.checks.end(), [](const CheckRecord& c) { return c.pass; });
    out << passed << "/" << r.checks.size() << " checks passed\n";
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace ksv
