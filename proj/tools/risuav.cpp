// risuav: plan a RIS-carrying UAV trajectory for a scenario file.
//
//   risuav validate --scenario scenarios/dense_urban.json
//   risuav plan --scenario scenarios/dense_urban.json --seed 42 --out out --emit-plots
//   risuav report --out out

#include <iostream>

#include <CLI11.hpp>

#include "risuav/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-stage trajectory planner for a RIS-equipped UAV relaying to a ground vehicle"};
    app.require_subcommand(1);

    risuav::RunConfig run;
    run.threads = risuav::default_threads();
    std::uint64_t seed = 0;
    std::string stage = "full";

    auto* plan = app.add_subcommand("plan", "run the planner and write artifacts");
    plan->add_option("--scenario", run.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    auto* seed_opt = plan->add_option("--seed", seed, "override planner.rng_seed");
    plan->add_option("--out", run.out_dir, "output directory")->capture_default_str();
    plan->add_option("--stage", stage, "stage1 | full")
        ->check(CLI::IsMember({"stage1", "full"}))
        ->capture_default_str();
    plan->add_flag("--emit-plots", run.emit_plots, "write slots.csv");
    plan->add_flag("--oracle", run.oracle, "cross-check stage 1 against exhaustive enumeration");
    plan->add_option("--threads", run.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    std::filesystem::path validate_path;
    auto* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("--scenario", validate_path, "scenario JSON")->required();

    std::filesystem::path report_dir = "out";
    auto* report = app.add_subcommand("report", "summarize artifacts of a previous run");
    report->add_option("--out", report_dir, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*plan) {
        if (*seed_opt) run.seed = seed;
        run.stage = stage == "stage1" ? risuav::StageSelector::stage1 : risuav::StageSelector::full;
        const risuav::RunOutcome outcome = risuav::run_pipeline(run);
        if (outcome.exit_code != risuav::exit_code::ok) {
            std::cerr << outcome.message << "\n";
            return outcome.exit_code;
        }
        std::cout << risuav::report_summary(run.out_dir);
        return 0;
    }
    if (*validate) {
        try {
            const auto s = risuav::load_scenario(validate_path);
            std::cout << "ok: " << s.route.size() << " waypoints, " << s.base_stations.size() << " base stations, "
                      << s.world.boxes.size() << " buildings, mission time " << s.mission_time() << " s\n";
            return 0;
        } catch (const risuav::ScenarioError& e) {
            std::cerr << e.what() << "\n";
            return risuav::exit_code::scenario_invalid;
        }
    }
    try {
        std::cout << risuav::report_summary(report_dir);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
