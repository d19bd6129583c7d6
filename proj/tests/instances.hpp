#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "risuav/stage1.hpp"
#include "risuav/stage2.hpp"

// Random small problem instances shared by the unit tests and the acceptance run.

namespace risuav::test {

/// Layered graph with K segments and up to `max_q` candidates per layer scattered
/// around an eastbound line. Limits are tight enough that speed and acceleration
/// both prune. Returns nullopt when a layer pair has no speed-feasible edge.
inline std::optional<LayeredGraph> random_graph(std::mt19937_64& rng, std::size_t K, int max_q,
                                                const KinematicLimits& lim) {
    std::uniform_real_distribution<double> off(-15.0, 15.0), head(-0.3, 0.3), alt(40.0, 60.0), dt(4.0, 6.0);
    std::uniform_int_distribution<int> count(1, max_q);
    std::vector<std::vector<CandidateNode>> layers(K + 1);
    std::vector<double> dts(K + 1, 0.0);
    for (std::size_t k = 0; k <= K; ++k) {
        const int q = count(rng);
        for (int i = 0; i < q; ++i) {
            const Vec3 p{40.0 * static_cast<double>(k) + off(rng), off(rng), alt(rng)};
            layers[k].push_back({static_cast<int>(k), i, {p, wrap_two_pi(head(rng))}, 15.0, 0, 0.0});
        }
        if (k > 0) dts[k] = dt(rng);
    }
    try {
        return build_layered_graph(std::move(layers), std::move(dts), lim);
    } catch (const InfeasibleError&) {
        return std::nullopt;
    }
}

inline KinematicLimits small_instance_limits() {
    KinematicLimits lim;
    lim.v_max = 12.0;
    lim.u_max = 5.0;
    lim.w_max = 0.5;
    lim.vdot_max = 2.0;
    lim.udot_max = 1.0;
    lim.wdot_max = 0.1;
    return lim;
}

/// Slot spheres on a short leg with a BS at the origin, each with 1..max_c candidates.
struct SlotInstance {
    Scenario scenario;
    std::vector<SlotSphere> slots;
    std::vector<std::vector<SlotCandidate>> candidates;
};

inline SlotInstance random_slot_instance(std::mt19937_64& rng, int max_slots, int max_c) {
    std::uniform_int_distribution<int> nslots(1, max_slots), ncand(1, max_c);
    std::uniform_real_distribution<double> ball(-10.0, 10.0);
    SlotInstance inst;
    inst.scenario.world.bounds = {{-100, -100, 0}, {1000, 1000, 300}};
    inst.scenario.base_stations = {{{0, 0, 20}}};
    const int n = nslots(rng);
    for (int e = 1; e <= n; ++e) {
        SlotSphere s{1, e, {100.0 + 10.0 * e, 50.0, 60.0}, 0.0, 15.0, {110.0 + 12.0 * e, 40.0, 0.0}, 0.5};
        std::vector<SlotCandidate> c;
        const int m = ncand(rng);
        for (int i = 0; i < m; ++i) c.push_back({s.center + Vec3{ball(rng), ball(rng), ball(rng)}, 0, 0.0});
        inst.slots.push_back(s);
        inst.candidates.push_back(std::move(c));
    }
    return inst;
}

/// Minimum of the summed slot cost over every combination of one candidate per slot.
inline double brute_force_objective(const SlotInstance& inst) {
    const Vec3& bs = inst.scenario.base_stations[0].position;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(inst.slots.size(), 0);
    while (true) {
        double f = 0.0;
        for (std::size_t i = 0; i < pick.size(); ++i)
            f += slot_cost(bs, inst.candidates[i][pick[i]].position, inst.slots[i].mt_position);
        best = std::min(best, f);
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == inst.candidates[i].size()) pick[i++] = 0;
        if (i == pick.size()) break;
    }
    return best;
}

}  // namespace risuav::test
