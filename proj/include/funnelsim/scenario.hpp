#pragma once

// Scenario files: a small sectioned key/value format.
//
//   # comment
//   [vehicle]
//   mass = 1200.0
//   [funnel]
//   channel0 = 200 2 0.25, 100 2 0.25, 300 2 0.5, 100 10 0.1
//   multipliers = 1.8 2 6
//
// Lists are whitespace-separated; tuple lists separate tuples with commas.
// Unknown sections or keys are rejected. Angles carry a _deg suffix and are
// converted with the data sheet's literal 1/57.3 factor.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "funnelsim/boundary.hpp"
#include "funnelsim/plant.hpp"
#include "funnelsim/reference.hpp"
#include "funnelsim/sim.hpp"

namespace funnelsim {

constexpr double kDegToRad = 1.0 / 57.3;

class ScenarioError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct IniValue {
    std::string raw;
    int line = 0;
    mutable bool used = false;
};

class IniDoc {
  public:
    void parse(std::istream& in, const std::string& filename) {
        filename_ = filename;
        std::string line;
        std::string section;
        int lineNo = 0;
        bool sawContent = false;
        while (std::getline(in, line)) {
            ++lineNo;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            sawContent = true;
            if (t.front() == '[') {
                if (t.back() != ']') fail(lineNo, "malformed section header '" + t + "'");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty()) fail(lineNo, "empty section name");
                sections_[section];  // create
                continue;
            }
            const std::size_t eq = t.find('=');
            if (eq == std::string::npos) fail(lineNo, "expected 'key = value', got '" + t + "'");
            if (section.empty()) fail(lineNo, "key outside of any section");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) fail(lineNo, "empty key");
            auto [it, inserted] = sections_[section].emplace(key, IniValue{value, lineNo});
            if (!inserted) fail(lineNo, "duplicate key '" + key + "' in [" + section + "]");
        }
        if (!sawContent) {
            throw ScenarioError(filename_ + ": scenario file is empty");
        }
    }

    bool hasSection(const std::string& s) const { return sections_.count(s) > 0; }
    bool has(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(k) > 0;
    }

    const IniValue* find(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) return nullptr;
        auto jt = it->second.find(k);
        if (jt == it->second.end()) return nullptr;
        jt->second.used = true;
        return &jt->second;
    }

    std::string getString(const std::string& s, const std::string& k) const {
        const IniValue* v = find(s, k);
        if (!v) throw ScenarioError(filename_ + ": missing key '" + k + "' in [" + s + "]");
        return v->raw;
    }
    std::string getString(const std::string& s, const std::string& k,
                          const std::string& fallback) const {
        const IniValue* v = find(s, k);
        return v ? v->raw : fallback;
    }

    double getDouble(const std::string& s, const std::string& k) const {
        const IniValue* v = find(s, k);
        if (!v) throw ScenarioError(filename_ + ": missing key '" + k + "' in [" + s + "]");
        return parseDouble(v->raw, v->line);
    }
    double getDouble(const std::string& s, const std::string& k, double fallback) const {
        const IniValue* v = find(s, k);
        return v ? parseDouble(v->raw, v->line) : fallback;
    }

    bool getBool(const std::string& s, const std::string& k, bool fallback) const {
        const IniValue* v = find(s, k);
        if (!v) return fallback;
        if (v->raw == "true" || v->raw == "1" || v->raw == "yes") return true;
        if (v->raw == "false" || v->raw == "0" || v->raw == "no") return false;
        fail(v->line, "expected boolean, got '" + v->raw + "'");
        return false;
    }

    std::vector<double> getDoubleList(const std::string& s, const std::string& k) const {
        const IniValue* v = find(s, k);
        if (!v) throw ScenarioError(filename_ + ": missing key '" + k + "' in [" + s + "]");
        return parseDoubleList(v->raw, v->line);
    }

    // Comma-separated tuples of doubles: "a b c, d e f".
    std::vector<std::vector<double>> getTupleList(const std::string& s,
                                                  const std::string& k) const {
        const IniValue* v = find(s, k);
        if (!v) throw ScenarioError(filename_ + ": missing key '" + k + "' in [" + s + "]");
        std::vector<std::vector<double>> out;
        std::stringstream ss(v->raw);
        std::string tuple;
        while (std::getline(ss, tuple, ',')) {
            const std::string t = trim(tuple);
            if (t.empty()) fail(v->line, "empty tuple in list");
            out.push_back(parseDoubleList(t, v->line));
        }
        if (out.empty()) fail(v->line, "empty list");
        return out;
    }

    std::vector<std::string> getStringList(const std::string& s, const std::string& k) const {
        const IniValue* v = find(s, k);
        if (!v) throw ScenarioError(filename_ + ": missing key '" + k + "' in [" + s + "]");
        std::vector<std::string> out;
        std::stringstream ss(v->raw);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    }

    void requireSections(const std::vector<std::string>& required) const {
        for (const std::string& s : required) {
            if (!hasSection(s)) {
                throw ScenarioError(filename_ + ": missing required section [" + s + "]");
            }
        }
        for (const auto& [name, keys] : sections_) {
            bool known = false;
            for (const std::string& s : required) known = known || (s == name);
            if (!known) {
                throw ScenarioError(filename_ + ": unknown section [" + name + "]");
            }
            (void)keys;
        }
    }

    void rejectUnusedKeys() const {
        for (const auto& [name, keys] : sections_) {
            for (const auto& [key, value] : keys) {
                if (!value.used) {
                    fail(value.line, "unknown key '" + key + "' in [" + name + "]");
                }
            }
        }
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ScenarioError(filename_ + ":" + std::to_string(line) + ": " + msg);
    }

  private:
    double parseDouble(const std::string& raw, int line) const {
        char* end = nullptr;
        const double v = std::strtod(raw.c_str(), &end);
        if (end == raw.c_str() || !trim(end).empty()) {
            fail(line, "expected number, got '" + raw + "'");
        }
        return v;
    }

    std::vector<double> parseDoubleList(const std::string& raw, int line) const {
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string tok;
        while (ss >> tok) out.push_back(parseDouble(tok, line));
        if (out.empty()) fail(line, "expected a list of numbers");
        return out;
    }

    std::string filename_;
    std::map<std::string, std::map<std::string, IniValue>> sections_;
};

}  // namespace detail

inline Scenario load_scenario(const std::string& filePath) {
    std::ifstream in(filePath);
    if (!in) throw ScenarioError("cannot open scenario file '" + filePath + "'");
    detail::IniDoc doc;
    doc.parse(in, filePath);
    doc.requireSections({"vehicle", "disturbance", "reference", "funnel", "initial",
                         "sim", "output"});

    Scenario sc;
    {
        const std::size_t slash = filePath.find_last_of("/\\");
        std::string stem = (slash == std::string::npos) ? filePath : filePath.substr(slash + 1);
        const std::size_t dot = stem.find_last_of('.');
        if (dot != std::string::npos) stem.erase(dot);
        sc.name = stem;
    }

    // --- vehicle ---
    sc.vehicle.m = doc.getDouble("vehicle", "mass");
    sc.vehicle.Jy = doc.getDouble("vehicle", "inertia_yaw");
    sc.vehicle.S = doc.getDouble("vehicle", "area");
    sc.vehicle.l = doc.getDouble("vehicle", "chord");
    sc.vehicle.qbar = doc.getDouble("vehicle", "qbar");
    sc.vehicle.alpha = doc.getDouble("vehicle", "alpha_deg") * kDegToRad;
    sc.vehicle.czAlpha = doc.getDouble("vehicle", "cz_alpha");
    sc.vehicle.czBeta = doc.getDouble("vehicle", "cz_beta");
    sc.vehicle.cz0 = doc.getDouble("vehicle", "cz_0");
    sc.vehicle.cmAlpha = doc.getDouble("vehicle", "cm_alpha");
    sc.vehicle.cmBeta = doc.getDouble("vehicle", "cm_beta");
    sc.vehicle.cmDeltaY = doc.getDouble("vehicle", "cm_delta");
    sc.vehicle.cm0 = doc.getDouble("vehicle", "cm_0");
    sc.includeChordInMoment = doc.getBool("vehicle", "include_chord_in_c4c5", false);

    // --- reference ---
    double V;
    if (doc.has("reference", "speed")) {
        V = doc.getDouble("reference", "speed");
    } else {
        const double mach = doc.getDouble("reference", "mach");
        const double a = doc.getDouble("reference", "sound_speed", 295.07);
        V = mach * a;
    }
    if (!(V > 0.0)) throw ScenarioError(filePath + ": reference speed must be > 0");
    sc.vehicle.V = V;
    sc.vehicle.validate();
    sc.constants = derive_constants(sc.vehicle, sc.includeChordInMoment);

    std::vector<Waypoint> waypoints;
    {
        const auto tuples = doc.getTupleList("reference", "waypoints");
        for (const auto& t : tuples) {
            if (t.size() != 2) {
                throw ScenarioError(filePath + ": each waypoint needs exactly 'x z'");
            }
            waypoints.push_back({t[0], t[1], ""});
        }
        if (doc.has("reference", "labels")) {
            const auto labels = doc.getStringList("reference", "labels");
            if (labels.size() != waypoints.size()) {
                throw ScenarioError(filePath + ": label count must match waypoint count");
            }
            for (std::size_t i = 0; i < labels.size(); ++i) waypoints[i].label = labels[i];
        }
    }
    std::vector<double> radii;
    {
        const std::string raw = doc.getString("reference", "radii", "auto");
        if (raw != "auto") {
            std::stringstream ss(raw);
            double v;
            while (ss >> v) radii.push_back(v);
        }
    }
    const double smoothingWidth = doc.getDouble("reference", "smoothing_width", 0.5);
    sc.path = build_dubins(waypoints, radii, V, smoothingWidth);
    const double smoothingTol = doc.getDouble("reference", "smoothing_tol", 0.5);
    if (!(smoothingTol > 0.0)) {
        throw ScenarioError(filePath + ": smoothing_tol must be > 0");
    }
    sc.smoothingTol = smoothingTol;

    const double window = doc.getDouble("reference", "trigger_window", 1e9);
    const double lead = doc.getDouble("reference", "trigger_lead", 0.0);
    const auto triggers = sc.path.triggerWindows(window, lead);

    // --- funnel ---
    std::vector<FunnelPhase> basePhases;
    for (const auto& t : doc.getTupleList("funnel", "channel0")) {
        if (t.size() != 3) {
            throw ScenarioError(filePath +
                                ": funnel phases need exactly 'rho0 rhoInf rate'");
        }
        if (!(t[1] > 0.0)) {
            throw ScenarioError(filePath + ": funnel phase violates rhoInf > 0");
        }
        basePhases.push_back({t[0], t[1], t[2]});
    }
    if (basePhases.size() != triggers.size() + 1) {
        throw ScenarioError(filePath + ": channel0 must list " +
                            std::to_string(triggers.size() + 1) + " phases (one more than " +
                            std::to_string(triggers.size()) + " maneuver windows)");
    }
    sc.schedules[0] = build_schedule(basePhases, triggers, 0);

    const bool hasMultipliers = doc.has("funnel", "multipliers");
    const bool hasExplicit = doc.has("funnel", "channel1") || doc.has("funnel", "channel2") ||
                             doc.has("funnel", "channel3");
    if (hasMultipliers && hasExplicit) {
        throw ScenarioError(filePath + ": give either multipliers or explicit channel1..3, not both");
    }
    if (hasMultipliers) {
        const auto mult = doc.getDoubleList("funnel", "multipliers");
        if (mult.size() != 3) {
            throw ScenarioError(filePath + ": multipliers must list 3 factors (channels 1..3)");
        }
        for (int i = 1; i < 4; ++i) {
            sc.schedules[i] = scaled_schedule(sc.schedules[0], mult[i - 1], i);
        }
    } else if (hasExplicit) {
        for (int i = 1; i < 4; ++i) {
            const std::string key = "channel" + std::to_string(i);
            if (!doc.has("funnel", key)) {
                throw ScenarioError(filePath + ": missing funnel key '" + key + "'");
            }
            std::vector<FunnelPhase> phases;
            for (const auto& t : doc.getTupleList("funnel", key)) {
                if (t.size() != 3) {
                    throw ScenarioError(filePath +
                                        ": funnel phases need exactly 'rho0 rhoInf rate'");
                }
                if (!(t[1] > 0.0)) {
                    throw ScenarioError(filePath + ": funnel phase violates rhoInf > 0");
                }
                phases.push_back({t[0], t[1], t[2]});
            }
            sc.schedules[i] = build_schedule(phases, triggers, i);
        }
    } else {
        throw ScenarioError(filePath + ": [funnel] needs multipliers or channel1..3");
    }

    // --- disturbance ---
    {
        const auto amp = doc.getDoubleList("disturbance", "amplitudes");
        if (amp.size() != 4) {
            throw ScenarioError(filePath + ": amplitudes must list 4 values");
        }
        for (int i = 0; i < 4; ++i) sc.disturbance.amplitudes[i] = amp[i];
        sc.disturbance.omega = doc.getDouble("disturbance", "omega", M_PI / 4.0);
        sc.disturbance.scale = doc.getDouble("disturbance", "scale", kDegToRad);
    }

    // --- initial ---
    sc.initialState.y0 = doc.getDouble("initial", "altitude");
    const double psiV = doc.getDouble("initial", "psi_v_deg") * kDegToRad;
    const double psi = doc.getDouble("initial", "psi_deg") * kDegToRad;
    sc.initialState.y1 = psiV;
    sc.initialState.y2 = psi - psiV;
    sc.initialState.y3 = doc.getDouble("initial", "omega_y");

    // --- sim ---
    {
        const std::string hraw = doc.getString("sim", "horizon", "auto");
        const double tail = doc.getDouble("sim", "tail", 5.0);
        if (hraw == "auto") {
            sc.horizon = sc.path.duration() + tail;
        } else {
            char* end = nullptr;
            sc.horizon = std::strtod(hraw.c_str(), &end);
            if (end == hraw.c_str()) {
                throw ScenarioError(filePath + ": horizon must be 'auto' or a number");
            }
        }
        if (!(sc.horizon > 0.0)) throw ScenarioError(filePath + ": horizon must be > 0");
        sc.sim.relTol = doc.getDouble("sim", "rel_tol", 1e-6);
        sc.sim.absTol = doc.getDouble("sim", "abs_tol", 1e-8);
        sc.sim.maxStep = doc.getDouble("sim", "max_step", 0.05);
        sc.sim.minStep = doc.getDouble("sim", "min_step", 1e-9);
        sc.sim.outputStep = doc.getDouble("sim", "output_step", 0.01);
        sc.sim.guard = doc.getDouble("sim", "guard", 1e-6);
        sc.saturationLimit = doc.getDouble("sim", "saturation", 40.0);
        if (!(sc.sim.relTol > 0.0) || !(sc.sim.absTol > 0.0)) {
            throw ScenarioError(filePath + ": tolerances must be > 0");
        }
        if (!(sc.sim.outputStep > 0.0)) {
            throw ScenarioError(filePath + ": output_step must be > 0");
        }
    }

    // --- output ---
    sc.outputDir = doc.getString("output", "dir", "out");
    sc.plots = doc.getBool("output", "plots", true);

    doc.rejectUnusedKeys();
    return sc;
}

}  // namespace funnelsim
