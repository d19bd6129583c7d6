#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "risuav/infeasible.hpp"
#include "risuav/parallel.hpp"
#include "risuav/stage1.hpp"
#include "risuav/stage2.hpp"
#include "risuav/world.hpp"

namespace risuav {

enum class StageSelector { stage1, full };

struct RunConfig {
    std::filesystem::path scenario;
    std::optional<std::uint64_t> seed;  // overrides planner.rng_seed
    std::filesystem::path out_dir = "out";
    StageSelector stage = StageSelector::full;
    bool emit_plots = false;
    bool oracle = false;
    unsigned threads = 1;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int scenario_invalid = 2;
inline constexpr int stage1_infeasible = 3;
inline constexpr int stage2_infeasible = 4;
}  // namespace exit_code

struct RunOutcome {
    int exit_code = exit_code::ok;
    std::string message;
    nlohmann::json summary;  // empty unless planning reached the summary step
};

// ---------------------------------------------------------------------------
// Artifact documents

namespace artifacts {

using nlohmann::json;

inline json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline json header(const std::string& hash, std::uint64_t seed) {
    return {{"scenario_hash", hash}, {"seed", seed}};
}

inline json tube_path(const Stage1Result& r, const std::string& hash, std::uint64_t seed) {
    json j = header(hash, seed);
    j["total_energy"] = r.tube.total_energy;
    j["valid_path_count"] = r.valid_path_count;
    j["steps"] = json::array();
    for (const TubeStep& s : r.tube.steps) {
        j["steps"].push_back({{"k", s.k},
                              {"q", s.q},
                              {"center", vec(s.center.position)},
                              {"heading", s.center.heading},
                              {"radius", s.radius},
                              {"input", {{"vx", s.input.vx}, {"vy", s.input.vy}, {"u", s.input.u}, {"omega", s.input.omega}}},
                              {"cumulative_energy", s.cumulative_energy},
                              {"serving_bs", s.serving_bs},
                              {"snr", s.snr}});
    }
    return j;
}

inline json trajectory(const EvaluationReport& eval, const RefinedTrajectory& traj, const std::string& hash,
                       std::uint64_t seed) {
    json j = header(hash, seed);
    j["objective"] = traj.objective;
    j["warnings"] = traj.warnings;
    j["slots"] = json::array();
    for (const SlotReport& s : eval.slots) {
        j["slots"].push_back({{"k", s.k},
                              {"epsilon", s.epsilon},
                              {"position", vec(s.position)},
                              {"heading", s.heading},
                              {"serving_bs", s.serving_bs},
                              {"phases", s.phases},
                              {"aoa_cos", s.link.aoa_cos},
                              {"aod_cos", s.link.aod_cos},
                              {"snr", s.link.snr},
                              {"rate", s.link.rate}});
    }
    return j;
}

inline std::string slots_csv(const EvaluationReport& eval, const std::string& hash, std::uint64_t seed) {
    std::ostringstream os;
    os << "# scenario_hash=" << hash << " seed=" << seed << "\n";
    os << "slot_index,snr,rate,dist_bs_uav,dist_uav_mt\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < eval.slots.size(); ++i) {
        const SlotReport& s = eval.slots[i];
        os << i << ',' << s.link.snr << ',' << s.link.rate << ',' << s.dist_bs_uav << ',' << s.dist_uav_mt << '\n';
    }
    return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace artifacts

/// Slots violating LoS on either hop or the SNR floor, as (index, reason).
inline std::vector<std::pair<std::size_t, std::string>> slot_violations(const EvaluationReport& eval,
                                                                        const Scenario& s) {
    std::vector<std::pair<std::size_t, std::string>> out;
    const double snr_min = s.channel.snr_min;
    for (std::size_t i = 0; i < eval.slots.size(); ++i) {
        const SlotReport& sl = eval.slots[i];
        const Vec3& bs = s.base_stations[sl.serving_bs].position;
        if (!los_clear(bs, sl.position, s.world) || !los_clear(sl.position, sl.mt_position, s.world))
            out.emplace_back(i, "LoS blocked");
        else if (sl.link.snr < snr_min)
            out.emplace_back(i, "snr below snr_min");
    }
    return out;
}

/// Loads the scenario, runs stage 1 (and stage 2 for a full run) and writes the artifacts.
inline RunOutcome run_pipeline(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    using nlohmann::json;
    const auto started = std::chrono::steady_clock::now();

    Scenario s;
    try {
        s = load_scenario(cfg.scenario);
    } catch (const ScenarioError& e) {
        return {exit_code::scenario_invalid, e.what(), {}};
    }
    const std::uint64_t seed = cfg.seed.value_or(s.planner.rng_seed);
    const std::string hash = scenario_hash(s);
    fs::create_directories(cfg.out_dir);

    auto infeasible = [&](const InfeasibleError& e) {
        json j = artifacts::header(hash, seed);
        j["stage"] = e.stage();
        j["k"] = e.k();
        j["epsilon"] = e.epsilon() ? json(*e.epsilon()) : json(nullptr);
        j["reason"] = e.reason();
        artifacts::write_json(cfg.out_dir / "infeasibility.json", j);
        return RunOutcome{e.stage() == 1 ? exit_code::stage1_infeasible : exit_code::stage2_infeasible, e.what(), {}};
    };

    Stage1Result stage1;
    try {
        stage1 = plan_stage1(s, seed);
    } catch (const InfeasibleError& e) {
        return infeasible(e);
    }
    artifacts::write_json(cfg.out_dir / "tube_path.json", artifacts::tube_path(stage1, hash, seed));

    json summary = artifacts::header(hash, seed);
    summary["stage"] = cfg.stage == StageSelector::full ? "full" : "stage1";
    summary["total_energy"] = stage1.tube.total_energy;
    summary["valid_path_count"] = stage1.valid_path_count;
    summary["segment_count"] = stage1.graph.segment_count();
    if (cfg.oracle) {
        json o;
        try {
            const auto paths = enumerate_valid_paths(stage1.graph, s.limits, s.planner.alpha1, s.planner.alpha2);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : paths) best = std::min(best, p.energy);
            o = {{"checked", true}, {"enumerated_paths", paths.size()}, {"min_energy", best},
                 {"match", best == stage1.tube.total_energy}};
        } catch (const std::length_error&) {
            o = {{"checked", false}, {"reason", "valid path count exceeds enumeration guard"}};
        }
        summary["oracle"] = o;
    }

    RunOutcome outcome;
    if (cfg.stage == StageSelector::full) {
        RefinedTrajectory traj;
        try {
            traj = plan_stage2(s, stage1.tube, seed, cfg.threads);
        } catch (const InfeasibleError& e) {
            return infeasible(e);
        }
        const EvaluationReport eval = evaluate_trajectory(traj, s, seed);
        artifacts::write_json(cfg.out_dir / "trajectory.json", artifacts::trajectory(eval, traj, hash, seed));
        if (cfg.emit_plots) artifacts::write_text(cfg.out_dir / "slots.csv", artifacts::slots_csv(eval, hash, seed));

        const auto violations = slot_violations(eval, s);
        summary["slot_count"] = eval.slots.size();
        summary["objective"] = traj.objective;
        summary["min_snr"] = eval.min_snr;
        summary["mean_snr"] = eval.mean_snr;
        summary["rate_seconds"] = eval.rate_seconds;
        summary["slots_ok"] = eval.slots.size() - violations.size();
        summary["warnings"] = traj.warnings.size();
        json segments = json::array();
        for (std::size_t k = 1; k < s.route.size(); ++k) {
            double lo = std::numeric_limits<double>::infinity();
            double sum = 0.0;
            int n = 0;
            for (const auto& sl : eval.slots) {
                if (sl.k != static_cast<int>(k)) continue;
                lo = std::min(lo, sl.link.snr);
                sum += sl.link.snr;
                ++n;
            }
            segments.push_back({{"k", k}, {"duration_s", s.route[k].travel_time}, {"min_snr", lo},
                                {"mean_snr", n ? sum / n : 0.0}});
        }
        summary["segments"] = segments;
        if (!violations.empty()) {
            const SlotReport& bad = eval.slots[violations.front().first];
            const InfeasibleError e(2, bad.k, bad.epsilon, violations.front().second);
            outcome = infeasible(e);
        }
    }

    summary["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    artifacts::write_json(cfg.out_dir / "summary.json", summary);
    outcome.summary = summary;
    return outcome;
}

/// Human-readable digest of summary.json in an output directory.
inline std::string report_summary(const std::filesystem::path& out_dir) {
    std::ifstream in(out_dir / "summary.json");
    if (!in) throw std::runtime_error("no summary.json in " + out_dir.string());
    const nlohmann::json j = nlohmann::json::parse(in);
    std::ostringstream os;
    os << "scenario " << j.at("scenario_hash").get<std::string>() << "  seed " << j.at("seed").get<std::uint64_t>()
       << "  stage " << j.at("stage").get<std::string>() << "\n";
    os << "energy              " << j.at("total_energy").dump() << "\n";
    os << "valid paths         " << j.at("valid_path_count").dump() << "\n";
    if (j.contains("oracle")) os << "oracle              " << j.at("oracle").dump() << "\n";
    if (j.contains("slot_count")) {
        os << "slots               " << j.at("slots_ok").dump() << "/" << j.at("slot_count").dump() << " ok\n";
        os << "snr min / mean      " << j.at("min_snr").dump() << " / " << j.at("mean_snr").dump() << "\n";
        os << "rate-seconds        " << j.at("rate_seconds").dump() << "\n";
        os << "continuity warnings " << j.at("warnings").dump() << "\n";
        os << "segment  duration_s  min_snr  mean_snr\n";
        for (const auto& seg : j.at("segments"))
            os << "  " << seg.at("k").dump() << "  " << seg.at("duration_s").dump() << "  "
               << seg.at("min_snr").dump() << "  " << seg.at("mean_snr").dump() << "\n";
    }
    os << "wall time [s]       " << j.at("wall_time_s").dump() << "\n";
    return os.str();
}

}  // namespace risuav
