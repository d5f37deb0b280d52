#pragma once

#include <random>
#include <utility>
#include <vector>

#include "icalo/environment.hpp"

namespace icalo {

// Conflict graph over managed links, with interference-power edge weights.
// External APs enter as fixed-channel interferers.
struct ConflictGraph {
    struct Edge {
        int a = 0, b = 0;  // link indices
        double weight = 0.0;
    };
    struct ExternalEdge {
        int link = 0, ap = 0;  // link index, external index
        double weight = 0.0;
    };
    std::vector<Edge> edges;
    std::vector<ExternalEdge> external_edges;
    std::vector<double> weight_degree;  // per link
};

ConflictGraph build_conflict_graph(const World& w);

// Tune every managed radio uniformly: backhaul-serving radios (and the mAP
// radio) to `backhaul`, fronthaul radios to `fronthaul`.
void apply_uniform_assignment(World& w, int backhaul, int fronthaul);

struct SingleChannelResult {
    int channel = 1;
    double objective_mbps = 0.0;
};

// All managed radios on one channel; returns the best channel by
// steady-state objective (lowest index on ties).
SingleChannelResult best_single_channel(const World& w);

// Common Channel Assignment: a seeded random ordered pair of orthogonal
// channels for (fronthaul, backhaul), applied mesh-wide.
std::pair<int, int> cca_assign(World& w, std::mt19937_64& rng);

// Greedy connected low-interference coloring of the conflict graph;
// radio-sharing links are colored as one group so connectivity holds by
// construction. Returns the per-link channel assignment (also applied).
std::vector<int> clica_assign(World& w);

struct BruteForceResult {
    Configuration best_config;
    double best_objective_mbps = 0.0;
    long evaluations = 0;
    bool found = false;
};

// Exhaustive search over extender locations x per-node channel tuples.
// Every visited combination counts as one evaluation; combinations that
// break constraints (a)-(d) are skipped for the objective. Refuses search
// spaces above 10^6 combinations.
BruteForceResult brute_force_optimum(const World& w, const std::vector<int>& location_set,
                                     const std::vector<int>& channel_set);

}  // namespace icalo
