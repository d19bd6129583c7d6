#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "risuav/channel.hpp"
#include "risuav/geometry.hpp"
#include "risuav/infeasible.hpp"
#include "risuav/parallel.hpp"
#include "risuav/random.hpp"
#include "risuav/stage1.hpp"
#include "risuav/world.hpp"

namespace risuav {

/// Slot epsilon (1-based) of tube segment k (1-based, joins route points k-1 and k).
struct SlotSphere {
    int k = 1;
    int epsilon = 1;
    Vec3 center;
    double heading = 0.0;
    double radius = 0.0;
    Vec3 mt_position;
    double dt = 0.0;
};

struct SlotCandidate {
    Vec3 position;
    std::size_t serving_bs = 0;
    double snr = 0.0;
};

struct SlotReport {
    int k = 1;
    int epsilon = 1;
    Vec3 position;
    double heading = 0.0;
    std::size_t serving_bs = 0;
    Vec3 mt_position;
    double dt = 0.0;
    PhaseVector phases;
    LinkSample link;
    double dist_bs_uav = 0.0;
    double dist_uav_mt = 0.0;
    double cost = 0.0;
};

struct RefinedTrajectory {
    std::vector<SlotReport> slots;
    double objective = 0.0;
    std::vector<std::string> warnings;
};

/// Per-slot spheres on the straight line between consecutive tube centers; the MT
/// moves at constant speed along each route leg.
inline std::vector<SlotSphere> discretize_tube(const TubePath& tube, std::span<const RouteWaypoint> route,
                                               const PlannerConfig& cfg) {
    if (cfg.slots_per_segment < 1) throw std::invalid_argument("slots_per_segment must be >= 1");
    if (tube.steps.size() != route.size()) throw std::invalid_argument("tube and route lengths differ");
    std::vector<SlotSphere> out;
    const int slots = cfg.slots_per_segment;
    for (std::size_t k = 1; k < tube.steps.size(); ++k) {
        const TubeStep& a = tube.steps[k - 1];
        const TubeStep& b = tube.steps[k];
        const double turn = wrap_pi(b.center.heading - a.center.heading);
        for (int eps = 1; eps <= slots; ++eps) {
            const double t = static_cast<double>(eps) / slots;
            SlotSphere s;
            s.k = static_cast<int>(k);
            s.epsilon = eps;
            s.center = eps == slots ? b.center.position : lerp(a.center.position, b.center.position, t);
            s.heading = wrap_two_pi(a.center.heading + t * turn);
            s.radius = b.radius;
            s.mt_position = eps == slots ? route[k].position : lerp(route[k - 1].position, route[k].position, t);
            s.dt = route[k].travel_time / slots;
            out.push_back(s);
        }
    }
    return out;
}

/// The center plus B uniform points in the slot ball, altitude clamped to the flight band.
template <class Rng>
std::vector<Vec3> sample_slot_positions(const SlotSphere& slot, const PlannerConfig& cfg, const KinematicLimits& lim,
                                        Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec3> out{slot.center};
    for (int b = 0; b < cfg.b_per_slot; ++b) {
        Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};
        double n = dir.norm();
        while (n == 0.0) {
            dir = {gauss(rng), gauss(rng), gauss(rng)};
            n = dir.norm();
        }
        const double radius = slot.radius * std::cbrt(unit(rng));
        Vec3 p = slot.center + dir * (radius / n);
        p.z = std::clamp(p.z, lim.z_min, lim.z_max);
        out.push_back(p);
    }
    return out;
}

inline std::vector<SlotCandidate> filter_slot_positions(std::span<const Vec3> points, const SlotSphere& slot,
                                                        const Scenario& s, const ChannelParams& link) {
    std::vector<SlotCandidate> out;
    for (const Vec3& p : points) {
        const auto choice = choose_serving_bs({p, slot.heading}, slot.mt_position, s, link);
        if (!choice || choice->snr < link.snr_min) continue;
        out.push_back({p, choice->bs, choice->snr});
    }
    return out;
}

/// Index of the minimum-cost candidate in each slot (first index on ties). Because the
/// objective is a sum of independent per-slot terms, this is also the joint minimum.
inline std::vector<std::size_t> select_min_cost(std::span<const std::vector<double>> costs) {
    std::vector<std::size_t> out;
    for (const auto& slot : costs) {
        if (slot.empty()) throw std::invalid_argument("slot without candidates");
        out.push_back(static_cast<std::size_t>(std::min_element(slot.begin(), slot.end()) - slot.begin()));
    }
    return out;
}

inline SlotReport make_slot_report(const SlotSphere& slot, const SlotCandidate& c, const Scenario& s,
                                   const ChannelParams& link, Complex direct = {}) {
    const Vec3& bs = s.base_stations[c.serving_bs].position;
    RisLink r = evaluate_ris_link(bs, c.position, slot.mt_position, link, direct);
    SlotReport rep;
    rep.k = slot.k;
    rep.epsilon = slot.epsilon;
    rep.position = c.position;
    rep.heading = slot.heading;
    rep.serving_bs = c.serving_bs;
    rep.mt_position = slot.mt_position;
    rep.dt = slot.dt;
    rep.phases = std::move(r.phases);
    rep.link = r.sample;
    rep.dist_bs_uav = distance(bs, c.position);
    rep.dist_uav_mt = distance(c.position, slot.mt_position);
    rep.cost = slot_cost(bs, c.position, slot.mt_position);
    return rep;
}

/// Flags consecutive positions further apart than the tube step allows plus the
/// 2r sphere slack. Stage 2 does not enforce motion limits, so these are warnings.
inline std::vector<std::string> continuity_warnings(std::span<const SlotReport> slots, double radius,
                                                    const KinematicLimits& lim) {
    std::vector<std::string> out;
    const double speed = std::hypot(lim.v_max, lim.u_max);
    for (std::size_t i = 1; i < slots.size(); ++i) {
        const SlotReport& b = slots[i];
        const double step = distance(slots[i - 1].position, b.position);
        const double limit = speed * b.dt + 2.0 * radius;
        if (step > limit)
            out.push_back("slot k=" + std::to_string(b.k) + " epsilon=" + std::to_string(b.epsilon) + ": step " +
                          std::to_string(step) + " m exceeds " + std::to_string(limit) + " m");
    }
    return out;
}

inline RefinedTrajectory select_refined_trajectory(std::span<const SlotSphere> slots,
                                                   std::span<const std::vector<SlotCandidate>> candidates,
                                                   const Scenario& s, const ChannelParams& link) {
    if (slots.size() != candidates.size()) throw std::invalid_argument("one candidate list per slot required");
    std::vector<std::vector<double>> costs(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (candidates[i].empty())
            throw InfeasibleError(2, slots[i].k, slots[i].epsilon, "no candidate position passes LoS/SNR");
        for (const SlotCandidate& c : candidates[i])
            costs[i].push_back(slot_cost(s.base_stations[c.serving_bs].position, c.position, slots[i].mt_position));
    }
    const auto choice = select_min_cost(costs);
    RefinedTrajectory traj;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        traj.slots.push_back(make_slot_report(slots[i], candidates[i][choice[i]], s, link));
        traj.objective += costs[i][choice[i]];
    }
    traj.warnings = continuity_warnings(traj.slots, s.planner.sphere_radius_m, s.limits);
    return traj;
}

inline RefinedTrajectory plan_stage2(const Scenario& s, const TubePath& tube, std::uint64_t seed,
                                     unsigned threads = 1) {
    const ChannelParams link = s.channel.linear();
    const auto slots = discretize_tube(tube, s.route, s.planner);
    std::vector<std::vector<SlotCandidate>> candidates(slots.size());
    parallel_for(slots.size(), threads, [&](std::size_t i) {
        Rng rng = make_rng(seed, Stream::stage2_slot, i);
        const auto points = sample_slot_positions(slots[i], s.planner, s.limits, rng);
        candidates[i] = filter_slot_positions(points, slots[i], s, link);
    });
    return select_refined_trajectory(slots, candidates, s, link);
}

struct EvaluationReport {
    std::vector<SlotReport> slots;
    double min_snr = 0.0;
    double mean_snr = 0.0;
    double rate_seconds = 0.0;  // sum of rate * slot duration [bit/Hz]
};

/// Re-evaluates every slot with a seeded Rayleigh draw for the direct BS-MT link.
inline EvaluationReport evaluate_trajectory(const RefinedTrajectory& traj, const Scenario& s, std::uint64_t seed,
                                            bool include_direct = true) {
    const ChannelParams link = s.channel.linear();
    EvaluationReport rep;
    for (std::size_t i = 0; i < traj.slots.size(); ++i) {
        SlotReport slot = traj.slots[i];
        const Vec3& bs = s.base_stations[slot.serving_bs].position;
        Complex direct{};
        if (include_direct) {
            Rng rng = make_rng(seed, Stream::direct_link, i);
            direct = direct_gain(bs, slot.mt_position, link, rng);
        }
        RisLink r = evaluate_ris_link(bs, slot.position, slot.mt_position, link, direct);
        slot.phases = std::move(r.phases);
        slot.link = r.sample;
        rep.slots.push_back(std::move(slot));
    }
    if (!rep.slots.empty()) {
        rep.min_snr = rep.slots.front().link.snr;
        for (const auto& sl : rep.slots) {
            rep.min_snr = std::min(rep.min_snr, sl.link.snr);
            rep.mean_snr += sl.link.snr;
            rep.rate_seconds += sl.link.rate * sl.dt;
        }
        rep.mean_snr /= static_cast<double>(rep.slots.size());
    }
    return rep;
}

}  // namespace risuav
