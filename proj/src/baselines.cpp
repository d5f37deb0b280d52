#include "icalo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace icalo {

namespace {
double lin_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
}

ConflictGraph build_conflict_graph(const World& w) {
    ConflictGraph cg;
    const auto& g = w.graph;
    const size_t E = g.links.size();
    cg.weight_degree.assign(E, 0.0);
    double wmax = 0.0;

    for (size_t e = 0; e < E; ++e) {
        for (size_t f = e + 1; f < E; ++f) {
            const Location& e_tx = g.nodes[g.links[e].parent].loc;
            const Location& e_rx = g.nodes[g.links[e].child].loc;
            const Location& f_tx = g.nodes[g.links[f].parent].loc;
            const Location& f_rx = g.nodes[g.links[f].child].loc;
            double wgt = lin_mw(rssi_at(f_tx, e_rx, w.phy)) + lin_mw(rssi_at(e_tx, f_rx, w.phy));
            cg.edges.push_back({static_cast<int>(e), static_cast<int>(f), wgt});
            wmax = std::max(wmax, wgt);
        }
    }
    for (size_t e = 0; e < E; ++e) {
        for (size_t x = 0; x < w.externals.size(); ++x) {
            const auto& ap = w.externals[x];
            if (!ap.active) continue;
            const Location& e_rx = g.nodes[g.links[e].child].loc;
            double wgt = lin_mw(rssi_at(ap.loc, e_rx, w.phy)) * ap.airtime(w.phy);
            cg.external_edges.push_back({static_cast<int>(e), static_cast<int>(x), wgt});
            wmax = std::max(wmax, wgt);
        }
    }
    if (wmax > 0.0) {
        for (auto& ed : cg.edges) ed.weight /= wmax;
        for (auto& ed : cg.external_edges) ed.weight /= wmax;
    }
    for (const auto& ed : cg.edges) {
        cg.weight_degree[ed.a] += ed.weight;
        cg.weight_degree[ed.b] += ed.weight;
    }
    for (const auto& ed : cg.external_edges) cg.weight_degree[ed.link] += ed.weight;
    return cg;
}

void apply_uniform_assignment(World& w, int backhaul, int fronthaul) {
    auto& g = w.graph;
    for (size_t v = 0; v < g.nodes.size(); ++v) {
        auto& n = g.nodes[v];
        if (n.role == NodeRole::Map) {
            for (auto& r : n.radios) r.channel = backhaul;
        } else if (n.role == NodeRole::Extender) {
            for (size_t d = 0; d < n.radios.size(); ++d)
                n.radios[d].channel = (d == 0) ? backhaul : fronthaul;
        }
    }
    for (auto& l : g.links) {
        l.channel = g.nodes[l.parent].radios[l.parent_radio].channel;
        g.nodes[l.child].radios[l.child_radio].channel = l.channel;
    }
}

SingleChannelResult best_single_channel(const World& w) {
    SingleChannelResult best{1, -1.0};
    for (int c = 1; c <= w.graph.n_channels; ++c) {
        World trial = w;
        apply_uniform_assignment(trial, c, c);
        double obj = trial.objective_mbps();
        if (obj > best.objective_mbps) best = {c, obj};
    }
    return best;
}

std::pair<int, int> cca_assign(World& w, std::mt19937_64& rng) {
    std::vector<int> ortho;
    for (int c : {1, 6, 11})
        if (c <= w.graph.n_channels) ortho.push_back(c);
    if (ortho.size() < 2)
        throw std::invalid_argument("cca_assign: fewer than 2 orthogonal channels available");
    std::vector<std::pair<int, int>> pairs;
    for (int a : ortho)
        for (int b : ortho)
            if (a != b) pairs.emplace_back(a, b);  // (fronthaul, backhaul)
    std::uniform_int_distribution<size_t> pick(0, pairs.size() - 1);
    auto [fh, bh] = pairs[pick(rng)];
    apply_uniform_assignment(w, bh, fh);
    return {fh, bh};
}

std::vector<int> clica_assign(World& w) {
    auto& g = w.graph;
    const size_t E = g.links.size();
    if (E == 0) return {};
    auto cg = build_conflict_graph(w);

    // Links that share a radio must share a channel: union them into groups.
    std::vector<int> group(E);
    std::iota(group.begin(), group.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (group[x] != x) x = group[x] = group[group[x]];
        return x;
    };
    for (size_t e = 0; e < E; ++e) {
        for (size_t f = e + 1; f < E; ++f) {
            const auto &le = g.links[e], &lf = g.links[f];
            bool shared =
                (le.parent == lf.parent && le.parent_radio == lf.parent_radio) ||
                (le.child == lf.child && le.child_radio == lf.child_radio) ||
                (le.parent == lf.child && le.parent_radio == lf.child_radio) ||
                (le.child == lf.parent && le.child_radio == lf.parent_radio);
            if (shared) group[find(static_cast<int>(e))] = find(static_cast<int>(f));
        }
    }

    std::vector<int> roots;
    for (size_t e = 0; e < E; ++e)
        if (std::find(roots.begin(), roots.end(), find(static_cast<int>(e))) == roots.end())
            roots.push_back(find(static_cast<int>(e)));
    auto degree_of = [&](int root) {
        double d = 0.0;
        for (size_t e = 0; e < E; ++e)
            if (find(static_cast<int>(e)) == root) d = std::max(d, cg.weight_degree[e]);
        return d;
    };
    std::stable_sort(roots.begin(), roots.end(),
                     [&](int a, int b) { return degree_of(a) > degree_of(b); });

    std::vector<int> color(E, 0);  // 0 = uncolored
    for (int root : roots) {
        double best_cost = std::numeric_limits<double>::infinity();
        int best_c = 1;
        for (int c = 1; c <= g.n_channels; ++c) {
            double cost = 0.0;
            for (const auto& ed : cg.edges) {
                bool a_in = find(ed.a) == root, b_in = find(ed.b) == root;
                if (a_in == b_in) continue;  // internal or unrelated pair
                int other = a_in ? ed.b : ed.a;
                if (color[other] == 0) continue;
                cost += ed.weight * channel_overlap(c, color[other]);
            }
            for (const auto& ed : cg.external_edges) {
                if (find(ed.link) != root) continue;
                cost += ed.weight * channel_overlap(c, w.externals[ed.ap].channel);
            }
            if (cost < best_cost) {
                best_cost = cost;
                best_c = c;
            }
        }
        for (size_t e = 0; e < E; ++e)
            if (find(static_cast<int>(e)) == root) color[e] = best_c;
    }

    for (size_t e = 0; e < E; ++e) {
        auto& l = g.links[e];
        l.channel = color[e];
        g.nodes[l.parent].radios[l.parent_radio].channel = color[e];
        g.nodes[l.child].radios[l.child_radio].channel = color[e];
    }
    if (!validate_constraints(g).empty()) {
        // blocked connectivity: fall back to a common channel everywhere
        apply_uniform_assignment(w, color[0], color[0]);
        std::fill(color.begin(), color.end(), color[0]);
    }
    return color;
}

BruteForceResult brute_force_optimum(const World& w, const std::vector<int>& location_set,
                                     const std::vector<int>& channel_set) {
    const auto& g = w.graph;
    const int managed = 1 + g.num_extenders();
    std::vector<NodeId> extenders;
    for (NodeId v = 0; v < managed; ++v)
        if (g.nodes[v].role == NodeRole::Extender) extenders.push_back(v);

    double space = 1.0;
    for (size_t i = 0; i < extenders.size(); ++i) space *= location_set.size();
    for (NodeId v = 0; v < managed; ++v)
        space *= std::pow(static_cast<double>(channel_set.size()),
                          static_cast<double>(g.nodes[v].radios.size()));
    if (space > 1e6)
        throw std::runtime_error("brute_force_optimum: search space of " +
                                 std::to_string(static_cast<long long>(space)) +
                                 " configurations exceeds the 10^6 budget");

    // Odometer digits: one per extender location, then one per radio.
    std::vector<int> digits;
    std::vector<int> bases;
    for (size_t i = 0; i < extenders.size(); ++i) bases.push_back(static_cast<int>(location_set.size()));
    for (NodeId v = 0; v < managed; ++v)
        for (size_t d = 0; d < g.nodes[v].radios.size(); ++d)
            bases.push_back(static_cast<int>(channel_set.size()));
    digits.assign(bases.size(), 0);

    BruteForceResult res;
    while (true) {
        ++res.evaluations;
        World trial = w;
        size_t di = 0;
        for (NodeId v : extenders) trial.graph.nodes[v].loc = trial.grid.at(location_set[digits[di++]]);
        for (NodeId v = 0; v < managed; ++v)
            for (auto& r : trial.graph.nodes[v].radios) r.channel = channel_set[digits[di++]];
        bool feasible = true;
        for (auto& l : trial.graph.links) {
            l.channel = trial.graph.nodes[l.parent].radios[l.parent_radio].channel;
            if (trial.graph.is_user(l.child))
                trial.graph.nodes[l.child].radios[l.child_radio].channel = l.channel;
            else if (trial.graph.nodes[l.child].radios[l.child_radio].channel != l.channel)
                feasible = false;
        }
        if (feasible && !validate_constraints(trial.graph).empty()) feasible = false;
        if (feasible) {
            double obj = trial.objective_mbps();
            if (!res.found || obj > res.best_objective_mbps) {
                res.found = true;
                res.best_objective_mbps = obj;
                res.best_config = trial.snapshot_config();
            }
        }
        // advance odometer
        size_t k = 0;
        for (; k < digits.size(); ++k) {
            if (++digits[k] < bases[k]) break;
            digits[k] = 0;
        }
        if (k == digits.size()) break;
    }
    return res;
}

}  // namespace icalo
