#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "risuav/world.hpp"

namespace risuav::test {

inline std::filesystem::path scenario_dir() { return RISUAV_SCENARIO_DIR; }
inline std::filesystem::path shipped_scenario() { return scenario_dir() / "dense_urban.json"; }

/// Empty 1 km box, one BS at the corner, a straight eastbound route at 10 m/s.
inline Scenario open_field(int waypoints = 3, double leg_m = 80.0, double leg_s = 8.0) {
    Scenario s;
    s.world.bounds = {{0, 0, 0}, {1000, 1000, 300}};
    s.base_stations = {{{20, 500, 30}}};
    for (int k = 0; k < waypoints; ++k)
        s.route.push_back({{100.0 + leg_m * k, 500, 0}, k == 0 ? 0.0 : leg_s});
    s.planner.heading_spread_rad = 0.5;
    return s;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("risuav_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_point(std::mt19937_64& rng, double lo, double hi) {
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

}  // namespace risuav::test
