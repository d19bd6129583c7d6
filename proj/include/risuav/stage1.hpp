#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "risuav/channel.hpp"
#include "risuav/geometry.hpp"
#include "risuav/infeasible.hpp"
#include "risuav/kinematics.hpp"
#include "risuav/random.hpp"
#include "risuav/world.hpp"

// Energy-efficient tube path: sample candidate poses around each route point,
// keep those with LoS and enough SNR, connect consecutive layers under the
// speed limits and pick the minimum-energy path whose consecutive steps also
// respect the acceleration limits.

namespace risuav {

struct CandidateNode {
    int k = 0;
    int q = 0;
    Pose pose;
    double sphere_radius = 0.0;
    std::size_t serving_bs = 0;
    double snr = 0.0;  // reflected-path SNR with optimal phases, at route point k
};

/// Speed-feasible transition between layer k-1 (from) and layer k (to).
struct Edge {
    int from = 0;
    int to = 0;
    ControlInput input;
};

struct LayeredGraph {
    std::vector<std::vector<CandidateNode>> layers;  // layers[k], k = 0..K
    std::vector<double> dts;                         // dts[k] = travel time into layer k; dts[0] unused
    std::vector<std::vector<Edge>> edges;            // edges[k] joins layers k-1 and k; edges[0] empty

    [[nodiscard]] std::size_t segment_count() const { return layers.empty() ? 0 : layers.size() - 1; }
};

struct TubeStep {
    int k = 0;
    int q = 0;
    Pose center;
    double radius = 0.0;
    ControlInput input;  // input flown to reach this sphere (zero for k = 0)
    double cumulative_energy = 0.0;
    std::size_t serving_bs = 0;
    double snr = 0.0;
};

struct TubePath {
    std::vector<TubeStep> steps;
    double total_energy = 0.0;

    [[nodiscard]] std::vector<int> q_sequence() const {
        std::vector<int> out;
        for (const auto& s : steps) out.push_back(s.q);
        return out;
    }
};

struct ValidPath {
    std::vector<int> q;  // candidate index per layer
    double energy = 0.0;
};

// ---------------------------------------------------------------------------

/// Q_k poses uniform over the cylinder {horizontal offset <= max_horiz_offset, z in [z_min, z_max]}.
template <class Rng>
std::vector<CandidateNode> sample_candidates(int k, const Vec3& route_point, const PlannerConfig& cfg,
                                             const KinematicLimits& lim, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<CandidateNode> out;
    out.reserve(static_cast<std::size_t>(cfg.q_per_point));
    for (int q = 0; q < cfg.q_per_point; ++q) {
        const double radius = cfg.max_horiz_offset_m * std::sqrt(unit(rng));
        const double bearing = 2.0 * std::numbers::pi * unit(rng);
        const double z = lim.z_min + (lim.z_max - lim.z_min) * unit(rng);
        const double heading = wrap_two_pi(cfg.heading_spread_rad * (unit(rng) - 0.5));
        const Vec3 p{route_point.x + radius * std::cos(bearing), route_point.y + radius * std::sin(bearing), z};
        out.push_back({k, q, {p, heading}, cfg.sphere_radius_m, 0, 0.0});
    }
    return out;
}

/// Best serving base station for a UAV position: the one maximizing the
/// optimal-phase SNR among those with LoS on both hops.
struct ServingChoice {
    std::size_t bs = 0;
    double snr = 0.0;
};

inline std::optional<ServingChoice> choose_serving_bs(const Pose& uav, const Vec3& mt, const Scenario& s,
                                                      const ChannelParams& link) {
    if (!los_clear(uav.position, mt, s.world)) return std::nullopt;
    std::optional<ServingChoice> best;
    for (std::size_t n = 0; n < s.base_stations.size(); ++n) {
        const Vec3& bs = s.base_stations[n].position;
        if (bs == uav.position || uav.position == mt) continue;
        if (!los_clear(bs, uav.position, s.world)) continue;
        if (s.planner.enable_same_side && !same_side_check(bs, uav, mt)) continue;
        const double value = coherent_snr(bs, uav.position, mt, link);
        if (!best || value > best->snr) best = ServingChoice{n, value};
    }
    return best;
}

/// Keeps candidates with LoS, SNR >= snr_min and an obstacle-free sphere. Fills serving_bs/snr.
inline std::vector<CandidateNode> filter_candidates(std::span<const CandidateNode> nodes, const Vec3& mt,
                                                    const Scenario& s, const ChannelParams& link) {
    std::vector<CandidateNode> out;
    for (CandidateNode node : nodes) {
        if (!s.world.bounds.contains(node.pose.position)) continue;
        if (!sphere_clear(node.pose.position, node.sphere_radius, s.world)) continue;
        const auto choice = choose_serving_bs(node.pose, mt, s, link);
        if (!choice || choice->snr < link.snr_min) continue;
        node.serving_bs = choice->bs;
        node.snr = choice->snr;
        out.push_back(node);
    }
    return out;
}

/// Extra admissibility test for a transition (from, to, k); empty means speed limits only.
using EdgePredicate = std::function<bool(const CandidateNode&, const CandidateNode&, std::size_t)>;

inline LayeredGraph build_layered_graph(std::vector<std::vector<CandidateNode>> layers, std::vector<double> dts,
                                        const KinematicLimits& lim, const EdgePredicate& admissible = {}) {
    if (layers.size() < 2) throw std::invalid_argument("need at least two layers");
    if (dts.size() != layers.size()) throw std::invalid_argument("one travel time per layer required");
    LayeredGraph g{std::move(layers), std::move(dts), {}};
    g.edges.resize(g.layers.size());
    for (std::size_t k = 0; k < g.layers.size(); ++k)
        if (g.layers[k].empty()) throw InfeasibleError(1, static_cast<int>(k), std::nullopt, "no candidates");
    for (std::size_t k = 1; k < g.layers.size(); ++k) {
        for (std::size_t a = 0; a < g.layers[k - 1].size(); ++a) {
            for (std::size_t b = 0; b < g.layers[k].size(); ++b) {
                const ControlInput in = step_input(g.layers[k - 1][a].pose, g.layers[k][b].pose, g.dts[k]);
                if (!check_speed(in, lim)) continue;
                if (admissible && !admissible(g.layers[k - 1][a], g.layers[k][b], k)) continue;
                g.edges[k].push_back({static_cast<int>(a), static_cast<int>(b), in});
            }
        }
        if (g.edges[k].empty())
            throw InfeasibleError(1, static_cast<int>(k), std::nullopt, "no speed-feasible transition from k-1");
    }
    return g;
}

namespace detail {

/// Transition admissibility between consecutive edges (prev == nullptr means hover start).
inline bool accel_ok(const Edge* prev, const Edge& cur, double dt, const KinematicLimits& lim) {
    return check_accel(prev ? prev->input : ControlInput{}, cur.input, dt, lim);
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

/// completions[k][e]: number of accel-consistent edge chains starting with edges[k][e] and reaching layer K.
inline std::vector<std::vector<std::uint64_t>> count_completions(const LayeredGraph& g, const KinematicLimits& lim) {
    const std::size_t K = g.segment_count();
    std::vector<std::vector<std::uint64_t>> c(K + 1);
    for (std::size_t k = K; k >= 1; --k) {
        c[k].assign(g.edges[k].size(), 0);
        for (std::size_t e = 0; e < g.edges[k].size(); ++e) {
            if (k == K) {
                c[k][e] = 1;
                continue;
            }
            for (std::size_t n = 0; n < g.edges[k + 1].size(); ++n) {
                const Edge& next = g.edges[k + 1][n];
                if (next.from == g.edges[k][e].to && accel_ok(&g.edges[k][e], next, g.dts[k + 1], lim))
                    c[k][e] = saturating_add(c[k][e], c[k + 1][n]);
            }
        }
    }
    return c;
}

}  // namespace detail

/// Number of speed- and acceleration-valid paths (saturates at 2^64-1).
inline std::uint64_t count_valid_paths(const LayeredGraph& g, const KinematicLimits& lim) {
    const auto c = detail::count_completions(g, lim);
    std::uint64_t total = 0;
    for (std::size_t e = 0; e < g.edges[1].size(); ++e)
        if (detail::accel_ok(nullptr, g.edges[1][e], g.dts[1], lim)) total = detail::saturating_add(total, c[1][e]);
    return total;
}

/// Exhaustive list of valid paths with their energies. Energies are accumulated
/// step by step from k = 1, the same order min_energy_path uses.
inline std::vector<ValidPath> enumerate_valid_paths(const LayeredGraph& g, const KinematicLimits& lim, double alpha1,
                                                    double alpha2, std::uint64_t guard = 1'000'000) {
    if (count_valid_paths(g, lim) > guard) throw std::length_error("valid path count exceeds enumeration guard");
    const std::size_t K = g.segment_count();
    std::vector<ValidPath> out;
    std::vector<int> q(K + 1);

    auto descend = [&](auto&& self, std::size_t k, const Edge* prev, double energy) -> void {
        if (k > K) {
            out.push_back({q, energy});
            return;
        }
        for (const Edge& e : g.edges[k]) {
            if (prev && e.from != prev->to) continue;
            if (!detail::accel_ok(prev, e, g.dts[k], lim)) continue;
            q[k - 1] = e.from;
            q[k] = e.to;
            self(self, k + 1, &e,
                 energy + step_energy(prev ? prev->input : ControlInput{}, e.input, g.dts[k], alpha1, alpha2));
        }
    };
    descend(descend, 1, nullptr, 0.0);
    return out;
}

/// Exact minimum-energy path by dynamic programming over (layer, incoming edge).
/// Ties resolve to the lexicographically smallest candidate-index sequence.
inline TubePath min_energy_path(const LayeredGraph& g, const KinematicLimits& lim, double alpha1, double alpha2) {
    const std::size_t K = g.segment_count();
    struct State {
        bool reachable = false;
        double cost = 0.0;
        std::vector<int> q;  // q[0..k]
    };
    auto better = [](double cost, const std::vector<int>& q, const State& s) {
        return !s.reachable || cost < s.cost || (cost == s.cost && q < s.q);
    };

    std::vector<std::vector<State>> best(K + 1);
    for (std::size_t k = 1; k <= K; ++k) {
        best[k].resize(g.edges[k].size());
        for (std::size_t e = 0; e < g.edges[k].size(); ++e) {
            const Edge& cur = g.edges[k][e];
            State& slot = best[k][e];
            if (k == 1) {
                if (!detail::accel_ok(nullptr, cur, g.dts[1], lim)) continue;
                slot = {true, 0.0 + step_energy({}, cur.input, g.dts[1], alpha1, alpha2), {cur.from, cur.to}};
                continue;
            }
            for (std::size_t p = 0; p < g.edges[k - 1].size(); ++p) {
                const Edge& prev = g.edges[k - 1][p];
                const State& from = best[k - 1][p];
                if (!from.reachable || prev.to != cur.from) continue;
                if (!detail::accel_ok(&prev, cur, g.dts[k], lim)) continue;
                const double cost = from.cost + step_energy(prev.input, cur.input, g.dts[k], alpha1, alpha2);
                std::vector<int> q = from.q;
                q.push_back(cur.to);
                if (better(cost, q, slot)) slot = {true, cost, std::move(q)};
            }
        }
    }

    const State* winner = nullptr;
    for (const State& s : best[K])
        if (s.reachable && (!winner || better(s.cost, s.q, *winner))) winner = &s;
    if (!winner) {
        // Report the first layer at which no accel-consistent prefix survives.
        int k_fail = static_cast<int>(K);
        for (std::size_t k = 1; k <= K; ++k) {
            if (std::none_of(best[k].begin(), best[k].end(), [](const State& s) { return s.reachable; })) {
                k_fail = static_cast<int>(k);
                break;
            }
        }
        throw InfeasibleError(1, k_fail, std::nullopt, "no acceleration-feasible path");
    }

    TubePath tube;
    double cumulative = 0.0;
    ControlInput prev{};
    for (std::size_t k = 0; k <= K; ++k) {
        const CandidateNode& node = g.layers[k][static_cast<std::size_t>(winner->q[k])];
        TubeStep step{static_cast<int>(k), node.q, node.pose, node.sphere_radius, {}, 0.0, node.serving_bs, node.snr};
        if (k > 0) {
            step.input = step_input(g.layers[k - 1][static_cast<std::size_t>(winner->q[k - 1])].pose, node.pose, g.dts[k]);
            cumulative += step_energy(prev, step.input, g.dts[k], alpha1, alpha2);
            prev = step.input;
        }
        step.cumulative_energy = cumulative;
        tube.steps.push_back(step);
    }
    tube.total_energy = winner->cost;
    return tube;
}

/// Draws `count` valid paths uniformly (with replacement) from the pruned graph.
template <class Rng>
std::vector<std::vector<int>> sample_valid_paths(const LayeredGraph& g, const KinematicLimits& lim, std::size_t count,
                                                 Rng& rng) {
    const auto c = detail::count_completions(g, lim);
    const std::size_t K = g.segment_count();
    auto pick = [&](const std::vector<std::size_t>& options, std::size_t k) {
        std::vector<double> w;
        for (auto e : options) w.push_back(static_cast<double>(c[k][e]));
        std::discrete_distribution<std::size_t> d(w.begin(), w.end());
        return options[d(rng)];
    };

    std::vector<std::size_t> starts;
    for (std::size_t e = 0; e < g.edges[1].size(); ++e)
        if (c[1][e] > 0 && detail::accel_ok(nullptr, g.edges[1][e], g.dts[1], lim)) starts.push_back(e);
    if (starts.empty()) return {};

    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<int> q(K + 1);
        std::size_t e = pick(starts, 1);
        q[0] = g.edges[1][e].from;
        q[1] = g.edges[1][e].to;
        for (std::size_t k = 2; k <= K; ++k) {
            std::vector<std::size_t> next;
            for (std::size_t n = 0; n < g.edges[k].size(); ++n) {
                const Edge& cand = g.edges[k][n];
                if (c[k][n] > 0 && cand.from == g.edges[k - 1][e].to &&
                    detail::accel_ok(&g.edges[k - 1][e], cand, g.dts[k], lim))
                    next.push_back(n);
            }
            e = pick(next, k);
            q[k] = g.edges[k][e].to;
        }
        out.push_back(std::move(q));
    }
    return out;
}

/// Inputs along a candidate-index path, for energy evaluation.
inline std::vector<ControlInput> path_inputs(const LayeredGraph& g, std::span<const int> q) {
    std::vector<ControlInput> out;
    for (std::size_t k = 1; k < q.size(); ++k)
        out.push_back(step_input(g.layers[k - 1][static_cast<std::size_t>(q[k - 1])].pose,
                                 g.layers[k][static_cast<std::size_t>(q[k])].pose, g.dts[k]));
    return out;
}

// ---------------------------------------------------------------------------

struct Stage1Result {
    LayeredGraph graph;
    TubePath tube;
    std::uint64_t valid_path_count = 0;
    std::vector<int> sampling_rounds;  // rounds used per route point
};

/// With planner.check_leg_los, a transition must also keep LoS and the SNR floor at
/// every interior slot point of the straight leg (MT moving at constant speed).
inline EdgePredicate leg_predicate(const Scenario& s) {
    if (!s.planner.check_leg_los) return {};
    return [&s, link = s.channel.linear()](const CandidateNode& a, const CandidateNode& b, std::size_t k) {
        const int slots = s.planner.slots_per_segment;
        const double turn = wrap_pi(b.pose.heading - a.pose.heading);
        for (int eps = 1; eps < slots; ++eps) {
            const double t = static_cast<double>(eps) / slots;
            const Pose p{lerp(a.pose.position, b.pose.position, t), wrap_two_pi(a.pose.heading + t * turn)};
            const Vec3 mt = lerp(s.route[k - 1].position, s.route[k].position, t);
            const auto choice = choose_serving_bs(p, mt, s, link);
            if (!choice || choice->snr < link.snr_min) return false;
        }
        return true;
    };
}

/// Candidate layers for the whole route. Each route point is topped up over
/// several sampling rounds until it holds Q_k filtered candidates, each of which
/// must be reachable at admissible speed from at least one candidate of the
/// previous layer.
inline std::vector<std::vector<CandidateNode>> sample_layers(const Scenario& s, std::uint64_t seed,
                                                             std::vector<int>* rounds_used = nullptr) {
    const EdgePredicate admissible = leg_predicate(s);
    const ChannelParams link = s.channel.linear();
    const PlannerConfig& cfg = s.planner;
    const auto want = static_cast<std::size_t>(cfg.q_per_point);
    std::vector<std::vector<CandidateNode>> layers(s.route.size());
    if (rounds_used) rounds_used->assign(s.route.size(), 0);

    for (std::size_t k = 0; k < s.route.size(); ++k) {
        const Vec3& mt = s.route[k].position;
        auto& accepted = layers[k];
        int round = 0;
        for (; round < cfg.max_sampling_rounds && accepted.size() < want; ++round) {
            Rng rng = make_rng(seed, Stream::stage1_candidates, k, static_cast<std::uint64_t>(round));
            const auto batch = sample_candidates(static_cast<int>(k), mt, cfg, s.limits, rng);
            for (const CandidateNode& node : filter_candidates(batch, mt, s, link)) {
                if (accepted.size() == want) break;
                if (cfg.sphere_dispersion &&
                    std::any_of(accepted.begin(), accepted.end(), [&](const CandidateNode& a) {
                        return distance(a.pose.position, node.pose.position) <= a.sphere_radius + node.sphere_radius;
                    }))
                    continue;
                if (k > 0 && std::none_of(layers[k - 1].begin(), layers[k - 1].end(), [&](const CandidateNode& a) {
                        return check_speed(step_input(a.pose, node.pose, s.route[k].travel_time), s.limits) &&
                               (!admissible || admissible(a, node, k));
                    }))
                    continue;
                accepted.push_back(node);
            }
        }
        if (rounds_used) (*rounds_used)[k] = round;
        if (accepted.empty())
            throw InfeasibleError(1, static_cast<int>(k), std::nullopt, "no candidate passes LoS/SNR/speed filters");
        for (std::size_t q = 0; q < accepted.size(); ++q) accepted[q].q = static_cast<int>(q);
    }
    return layers;
}

inline Stage1Result plan_stage1(const Scenario& s, std::uint64_t seed) {
    Stage1Result r;
    auto layers = sample_layers(s, seed, &r.sampling_rounds);
    std::vector<double> dts;
    for (const auto& w : s.route) dts.push_back(w.travel_time);
    r.graph = build_layered_graph(std::move(layers), std::move(dts), s.limits, leg_predicate(s));
    r.tube = min_energy_path(r.graph, s.limits, s.planner.alpha1, s.planner.alpha2);
    r.valid_path_count = count_valid_paths(r.graph, s.limits);
    return r;
}

}  // namespace risuav
