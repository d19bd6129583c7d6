#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "risuav/channel.hpp"
#include "risuav/geometry.hpp"
#include "risuav/kinematics.hpp"

namespace risuav {

struct BaseStation {
    Vec3 position;
    friend bool operator==(const BaseStation&, const BaseStation&) = default;
};

/// One point of the MT route. travel_time is the time from the previous point (0 for the first).
struct RouteWaypoint {
    Vec3 position;
    double travel_time = 0.0;
    friend bool operator==(const RouteWaypoint&, const RouteWaypoint&) = default;
};

/// Link budget as written in scenario files (powers in dBm, rho in dB).
struct ChannelConfig {
    double p_bs_dbm = 30.0;
    double noise_dbm = -80.0;
    double rho_db = 10.0;
    double gamma = 2.5;
    double lambda_m = 1e-2;
    double d_m = 5e-3;
    int m_elements = 16;
    double snr_min = 1.0;
    double varpi = 0.0;

    friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;

    [[nodiscard]] ChannelParams linear() const {
        return {dbm_to_watt(p_bs_dbm), dbm_to_watt(noise_dbm), db_to_linear(rho_db), gamma, lambda_m, d_m,
                m_elements, snr_min, varpi};
    }
};

struct PlannerConfig {
    int q_per_point = 6;
    double sphere_radius_m = 15.0;
    double max_horiz_offset_m = 50.0;
    int slots_per_segment = 25;
    int b_per_slot = 20;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    std::uint64_t rng_seed = 42;
    bool enable_same_side = false;
    // Candidate headings are drawn uniformly from [-spread/2, spread/2) (wrapped).
    double heading_spread_rad = 2.0 * std::numbers::pi;
    // Sampling rounds per route point while topping up to q_per_point valid candidates.
    int max_sampling_rounds = 50;
    // Reject candidates whose sphere overlaps an already accepted sphere at the same route point.
    bool sphere_dispersion = false;
    // Require LoS and the SNR floor along each straight tube leg, not only at route points.
    bool check_leg_los = false;

    friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

struct Scenario {
    OccupancyWorld world;
    double mt_altitude_m = 0.0;
    std::vector<BaseStation> base_stations;
    std::vector<RouteWaypoint> route;
    KinematicLimits limits;
    ChannelConfig channel;
    PlannerConfig planner;

    friend bool operator==(const Scenario&, const Scenario&) = default;

    [[nodiscard]] double mission_time() const {
        double t = 0.0;
        for (const auto& w : route) t += w.travel_time;
        return t;
    }
};

struct Violation {
    std::string field;
    std::string rule;

    [[nodiscard]] std::string to_string() const { return field + ": " + rule; }
};

/// Parse failure or invariant violation while loading a scenario.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<Violation> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<Violation>& vs) {
        std::string out = "invalid scenario";
        for (const auto& v : vs) out += "\n  " + v.to_string();
        return out;
    }

    std::vector<Violation> violations_;
};

inline std::vector<Violation> validate_scenario(const Scenario& s) {
    std::vector<Violation> out;
    auto fail = [&](std::string field, std::string rule) { out.push_back({std::move(field), std::move(rule)}); };
    auto idx = [](const char* base, std::size_t i) { return std::string(base) + "[" + std::to_string(i) + "]"; };

    const Aabb& bounds = s.world.bounds;
    if (!bounds.valid()) fail("world.bounds", "min must not exceed max");
    for (std::size_t i = 0; i < s.world.boxes.size(); ++i) {
        const Aabb& b = s.world.boxes[i];
        if (!b.valid())
            fail(idx("world.boxes", i), "min must not exceed max");
        else if (!bounds.contains(b))
            fail(idx("world.boxes", i), "must lie inside world.bounds");
    }
    if (!std::isfinite(s.mt_altitude_m) || s.mt_altitude_m < 0.0) fail("world.mt_altitude_m", "must be ≥ 0");

    if (s.base_stations.empty()) fail("base_stations", "at least one base station required");
    for (std::size_t i = 0; i < s.base_stations.size(); ++i) {
        const Vec3& p = s.base_stations[i].position;
        if (!p.finite() || !bounds.contains(p)) fail(idx("base_stations", i) + ".position", "must lie inside world.bounds");
        else if (p.z < 0.0) fail(idx("base_stations", i) + ".position", "z must be ≥ 0");
    }

    if (s.route.size() < 2) fail("route", "at least two waypoints required");
    for (std::size_t k = 0; k < s.route.size(); ++k) {
        const RouteWaypoint& w = s.route[k];
        const std::string f = idx("route", k);
        if (!w.position.finite() || !bounds.contains(w.position))
            fail(f + ".position", "must lie inside world.bounds");
        if (w.position.z != s.mt_altitude_m) fail(f + ".position", "z must equal world.mt_altitude_m");
        if (k == 0) {
            if (w.travel_time != 0.0) fail(f + ".travel_time_s", "must be 0 for the first waypoint");
        } else if (!(w.travel_time > 0.0) || !std::isfinite(w.travel_time)) {
            fail(f + ".travel_time_s", "must be > 0");
        }
    }

    const KinematicLimits& l = s.limits;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(std::string("limits.") + name, "must be > 0");
    };
    positive(l.v_max, "v_max");
    positive(l.u_max, "u_max");
    positive(l.w_max, "w_max");
    positive(l.vdot_max, "vdot_max");
    positive(l.udot_max, "udot_max");
    positive(l.wdot_max, "wdot_max");
    if (!std::isfinite(l.z_min) || !std::isfinite(l.z_max)) fail("limits.z_min", "must be finite");
    else if (!(l.z_min < l.z_max)) fail("limits.z_min", "must be < limits.z_max");
    else if (l.z_min <= 0.0) fail("limits.z_min", "must be > 0");

    const ChannelConfig& c = s.channel;
    if (!std::isfinite(c.p_bs_dbm)) fail("channel.p_bs_dbm", "must be finite");
    if (!std::isfinite(c.noise_dbm)) fail("channel.noise_dbm", "must be finite");
    if (!std::isfinite(c.rho_db)) fail("channel.rho_db", "must be finite");
    if (!(c.gamma >= 2.0) || !std::isfinite(c.gamma)) fail("channel.gamma", "must be ≥ 2");
    if (!(c.lambda_m > 0.0)) fail("channel.lambda_m", "must be > 0");
    if (!(c.d_m > 0.0)) fail("channel.d_m", "must be > 0");
    if (c.m_elements < 1) fail("channel.m_elements", "must be ≥ 1");
    if (!(c.snr_min > 0.0)) fail("channel.snr_min", "must be > 0");
    if (!(c.varpi >= 0.0 && c.varpi < 2.0 * std::numbers::pi)) fail("channel.varpi", "must be in [0, 2π)");

    const PlannerConfig& p = s.planner;
    if (p.q_per_point < 1) fail("planner.q_per_point", "must be ≥ 1");
    if (!(p.sphere_radius_m > 0.0)) fail("planner.sphere_radius_m", "must be > 0");
    if (!(p.max_horiz_offset_m >= 0.0)) fail("planner.max_horiz_offset_m", "must be ≥ 0");
    if (p.slots_per_segment < 1) fail("planner.slots_per_segment", "must be ≥ 1");
    if (p.b_per_slot < 1) fail("planner.b_per_slot", "must be ≥ 1");
    if (!(p.alpha1 >= 0.0)) fail("planner.alpha1", "must be ≥ 0");
    if (!(p.alpha2 >= 0.0)) fail("planner.alpha2", "must be ≥ 0");
    if (!(p.heading_spread_rad >= 0.0 && p.heading_spread_rad <= 2.0 * std::numbers::pi))
        fail("planner.heading_spread_rad", "must be in [0, 2π]");
    if (p.max_sampling_rounds < 1) fail("planner.max_sampling_rounds", "must be ≥ 1");
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

    [[nodiscard]] Reader child(const std::string& key) const {
        return {require(key), join(key)};
    }

    [[nodiscard]] const json& require(const std::string& key) const {
        if (!node_.is_object()) throw error(path_, "expected object");
        auto it = node_.find(key);
        if (it == node_.end()) throw error(join(key), "missing field");
        return *it;
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_.is_object() && node_.contains(key); }

    [[nodiscard]] double number(const std::string& key) const {
        const json& v = require(key);
        if (!v.is_number()) throw error(join(key), "expected number");
        return v.get<double>();
    }
    [[nodiscard]] double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    [[nodiscard]] int integer(const std::string& key) const {
        const json& v = require(key);
        if (!v.is_number_integer()) throw error(join(key), "expected integer");
        return v.get<int>();
    }
    [[nodiscard]] int integer(const std::string& key, int fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    [[nodiscard]] std::uint64_t seed(const std::string& key) const {
        const json& v = require(key);
        if (!v.is_number_unsigned()) throw error(join(key), "expected non-negative integer");
        return v.get<std::uint64_t>();
    }

    [[nodiscard]] bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = require(key);
        if (!v.is_boolean()) throw error(join(key), "expected boolean");
        return v.get<bool>();
    }

    /// [x, y, z]; a two-element array takes z from default_z.
    [[nodiscard]] Vec3 vec3(const std::string& key, std::optional<double> default_z = std::nullopt) const {
        const json& v = require(key);
        const bool two = default_z.has_value() && v.is_array() && v.size() == 2;
        if (!v.is_array() || (v.size() != 3 && !two)) throw error(join(key), "expected [x, y, z]");
        for (const auto& e : v)
            if (!e.is_number()) throw error(join(key), "expected [x, y, z]");
        return {v[0].get<double>(), v[1].get<double>(), two ? *default_z : v[2].get<double>()};
    }

    [[nodiscard]] Aabb box() const { return {vec3("min"), vec3("max")}; }

    [[nodiscard]] std::vector<Reader> array(const std::string& key) const {
        const json& v = require(key);
        if (!v.is_array()) throw error(join(key), "expected array");
        std::vector<Reader> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], join(key) + "[" + std::to_string(i) + "]");
        return out;
    }

private:
    [[nodiscard]] std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    static ScenarioError error(const std::string& field, const std::string& rule) {
        return ScenarioError({{field, rule}});
    }

    const json& node_;
    std::string path_;
};

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
inline json to_json(const Aabb& b) { return {{"min", to_json(b.min)}, {"max", to_json(b.max)}}; }

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
    using detail::to_json;
    nlohmann::json j;
    j["world"]["bounds"] = to_json(s.world.bounds);
    j["world"]["boxes"] = nlohmann::json::array();
    for (const auto& b : s.world.boxes) j["world"]["boxes"].push_back(to_json(b));
    j["world"]["mt_altitude_m"] = s.mt_altitude_m;
    j["base_stations"] = nlohmann::json::array();
    for (const auto& bs : s.base_stations) j["base_stations"].push_back({{"position", to_json(bs.position)}});
    j["route"] = nlohmann::json::array();
    for (const auto& w : s.route) j["route"].push_back({{"position", to_json(w.position)}, {"travel_time_s", w.travel_time}});
    const auto& l = s.limits;
    j["limits"] = {{"v_max", l.v_max},       {"u_max", l.u_max},       {"w_max", l.w_max},
                   {"z_min", l.z_min},       {"z_max", l.z_max},       {"vdot_max", l.vdot_max},
                   {"udot_max", l.udot_max}, {"wdot_max", l.wdot_max}};
    const auto& c = s.channel;
    j["channel"] = {{"p_bs_dbm", c.p_bs_dbm}, {"noise_dbm", c.noise_dbm},   {"rho_db", c.rho_db},
                    {"gamma", c.gamma},       {"lambda_m", c.lambda_m},     {"d_m", c.d_m},
                    {"m_elements", c.m_elements}, {"snr_min", c.snr_min}, {"varpi", c.varpi}};
    const auto& p = s.planner;
    j["planner"] = {{"q_per_point", p.q_per_point},
                    {"sphere_radius_m", p.sphere_radius_m},
                    {"max_horiz_offset_m", p.max_horiz_offset_m},
                    {"slots_per_segment", p.slots_per_segment},
                    {"b_per_slot", p.b_per_slot},
                    {"alpha1", p.alpha1},
                    {"alpha2", p.alpha2},
                    {"rng_seed", p.rng_seed},
                    {"enable_same_side", p.enable_same_side},
                    {"heading_spread_rad", p.heading_spread_rad},
                    {"max_sampling_rounds", p.max_sampling_rounds},
                    {"sphere_dispersion", p.sphere_dispersion},
                    {"check_leg_los", p.check_leg_los}};
    return j;
}

/// Builds a scenario from a parsed document without checking invariants.
inline Scenario scenario_from_json(const nlohmann::json& doc) {
    const detail::Reader root(doc, "");
    Scenario s;

    const auto world = root.child("world");
    s.world.bounds = world.child("bounds").box();
    for (const auto& b : world.array("boxes")) s.world.boxes.push_back(b.box());
    s.mt_altitude_m = world.number("mt_altitude_m", 0.0);

    for (const auto& bs : root.array("base_stations")) s.base_stations.push_back({bs.vec3("position")});
    for (const auto& w : root.array("route"))
        s.route.push_back({w.vec3("position", s.mt_altitude_m), w.number("travel_time_s")});

    const auto lim = root.child("limits");
    s.limits = {lim.number("v_max"),    lim.number("u_max"),    lim.number("w_max"),    lim.number("z_min"),
                lim.number("z_max"),    lim.number("vdot_max"), lim.number("udot_max"), lim.number("wdot_max")};

    const auto ch = root.child("channel");
    s.channel = {ch.number("p_bs_dbm"), ch.number("noise_dbm"), ch.number("rho_db"),
                 ch.number("gamma"),    ch.number("lambda_m"),  ch.number("d_m"),
                 ch.integer("m_elements"), ch.number("snr_min"), ch.number("varpi", 0.0)};

    const auto pl = root.child("planner");
    PlannerConfig& p = s.planner;
    p.q_per_point = pl.integer("q_per_point");
    p.sphere_radius_m = pl.number("sphere_radius_m");
    p.max_horiz_offset_m = pl.number("max_horiz_offset_m");
    p.slots_per_segment = pl.integer("slots_per_segment");
    p.b_per_slot = pl.integer("b_per_slot");
    p.alpha1 = pl.number("alpha1");
    p.alpha2 = pl.number("alpha2");
    p.rng_seed = pl.seed("rng_seed");
    p.enable_same_side = pl.boolean("enable_same_side", false);
    p.heading_spread_rad = pl.number("heading_spread_rad", 2.0 * std::numbers::pi);
    p.max_sampling_rounds = pl.integer("max_sampling_rounds", 50);
    p.sphere_dispersion = pl.boolean("sphere_dispersion", false);
    p.check_leg_los = pl.boolean("check_leg_los", false);
    return s;
}

inline Scenario parse_scenario(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError({{"<document>", std::string("parse error: ") + e.what()}});
    }
    Scenario s = scenario_from_json(doc);
    if (auto violations = validate_scenario(s); !violations.empty()) throw ScenarioError(std::move(violations));
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError({{"<file>", "cannot open " + path.string()}});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

/// Keys are sorted (nlohmann::json objects are ordered maps).
inline std::string dump_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

inline void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << dump_scenario(s);
}

/// FNV-1a over the canonical serialization, as 16 hex digits.
inline std::string scenario_hash(const Scenario& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : scenario_to_json(s).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace risuav
