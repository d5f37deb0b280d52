#include "icalo/environment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace icalo {

namespace {
constexpr double kPacketBytes = 1000.0;
}

double channel_overlap(int a, int b) {
    double dc = std::abs(a - b);
    return std::max(0.0, (5.0 - dc) / 5.0);
}

double ExternalAp::airtime(const PhyParams& p) const {
    double rmax = link_rmax(rssi_at(loc, client_loc, p), p);
    if (rmax <= 0.0) return 1.0;
    return std::clamp(offered_bps / rmax, 0.0, 1.0);
}

void World::init_counters() {
    counters.radios.assign(graph.nodes.size(), {});
    for (size_t v = 0; v < graph.nodes.size(); ++v)
        counters.radios[v].assign(graph.nodes[v].radios.size(), RadioCounters{});
    counters.users.assign(graph.num_users(), UserCounters{});
}

std::vector<World::Transmitter> World::transmitters() const {
    std::vector<Transmitter> out;
    for (const auto& ap : externals) {
        if (!ap.active) continue;
        out.push_back({ap.loc, ap.channel, ap.airtime(phy), -1, -1});
    }
    // Managed downlink transmitters: one entry per link, at the parent.
    std::vector<double> offered(graph.links.size(), 0.0);
    for (NodeId u = graph.first_user(); u < static_cast<int>(graph.nodes.size()); ++u) {
        if (graph.uplink_of(u) < 0) continue;
        Path p = path_of(u, graph);
        for (const auto& l : p.links) {
            for (size_t e = 0; e < graph.links.size(); ++e)
                if (graph.links[e].parent == l.parent && graph.links[e].child == l.child)
                    offered[e] += demand_bps[user_ordinal(u)];
        }
    }
    for (size_t e = 0; e < graph.links.size(); ++e) {
        const auto& l = graph.links[e];
        if (offered[e] <= 0.0) continue;
        double rmax = link_rmax(rssi_at(graph.nodes[l.parent].loc, graph.nodes[l.child].loc, phy), phy);
        double at = rmax > 0.0 ? std::clamp(offered[e] / rmax, 0.0, 1.0) : 1.0;
        out.push_back({graph.nodes[l.parent].loc, l.channel, at, l.parent, static_cast<int>(e)});
    }
    return out;
}

double World::utilization_at(const Location& loc, int channel, NodeId exclude_node,
                             int exclude_link) const {
    double busy = 0.0;
    for (const auto& t : transmitters()) {
        if (exclude_link >= 0 && t.link == exclude_link) continue;
        if (exclude_node >= 0 && t.node == exclude_node) continue;
        if (rssi_at(t.loc, loc, phy) < phy.cca_threshold_dbm) continue;
        busy += t.airtime * channel_overlap(t.channel, channel);
    }
    return std::clamp(busy * 100.0, 0.0, 100.0);
}

double World::foreign_utilization(const Link& l, const Location& loc) const {
    double busy = 0.0;
    for (const auto& t : transmitters()) {
        if (t.node == l.parent || t.node == l.child) continue;
        if (rssi_at(t.loc, loc, phy) < phy.cca_threshold_dbm) continue;
        busy += t.airtime * channel_overlap(t.channel, l.channel);
    }
    return std::clamp(busy * 100.0, 0.0, 100.0);
}

double World::ground_truth_utilization(const Location& loc, int channel) const {
    if (channel < 1 || channel > graph.n_channels)
        throw std::invalid_argument("ground_truth_utilization: channel out of range");
    return utilization_at(loc, channel, -1, -1);
}

LinkEval World::evaluate() const {
    LinkEval ev;
    const size_t E = graph.links.size();
    ev.rmax_bps.assign(E, 0.0);
    ev.busy_fraction.assign(E, 0.0);
    ev.error_rate.assign(E, 0.0);
    ev.capacity_bps.assign(E, 0.0);
    ev.offered_airtime.assign(E, 0.0);
    ev.sharing_users.assign(E, 0);

    const int U = graph.num_users();
    std::vector<Path> paths(U);
    std::vector<bool> connected(U, false);
    std::vector<double> offered(E, 0.0);
    for (int k = 0; k < U; ++k) {
        NodeId u = graph.first_user() + k;
        if (graph.uplink_of(u) < 0) continue;
        paths[k] = path_of(u, graph);
        connected[k] = true;
        for (const auto& l : paths[k].links) {
            for (size_t e = 0; e < E; ++e) {
                if (graph.links[e].parent == l.parent && graph.links[e].child == l.child) {
                    ev.sharing_users[e]++;
                    offered[e] += demand_bps[k];
                }
            }
        }
    }

    auto txs = transmitters();
    for (size_t e = 0; e < E; ++e) {
        const auto& l = graph.links[e];
        const Location& tx_loc = graph.nodes[l.parent].loc;
        const Location& rx_loc = graph.nodes[l.child].loc;
        ev.rmax_bps[e] = link_rmax(rssi_at(tx_loc, rx_loc, phy), phy);
        double busy = 0.0, err = 0.0;
        for (const auto& t : txs) {
            if (t.link == static_cast<int>(e)) continue;
            double w = t.airtime * channel_overlap(t.channel, l.channel);
            if (w <= 0.0) continue;
            bool heard_at_tx = rssi_at(t.loc, tx_loc, phy) >= phy.cca_threshold_dbm;
            bool heard_at_rx = rssi_at(t.loc, rx_loc, phy) >= phy.cca_threshold_dbm;
            if (heard_at_tx) busy += w;
            else if (heard_at_rx) err += w;  // hidden w.r.t. this link
        }
        ev.busy_fraction[e] = std::min(busy, 1.0);
        ev.error_rate[e] = std::min(err, 1.0);
        ev.capacity_bps[e] = ev.rmax_bps[e] * (1.0 - ev.busy_fraction[e]) * (1.0 - ev.error_rate[e]);
        ev.offered_airtime[e] =
            ev.rmax_bps[e] > 0.0 ? std::clamp(offered[e] / ev.rmax_bps[e], 0.0, 1.0)
                                 : (offered[e] > 0.0 ? 1.0 : 0.0);
    }

    ev.user_throughput_bps.assign(U, 0.0);
    ev.user_error_rate.assign(U, 0.0);
    ev.delivered_airtime.assign(E, 0.0);
    std::vector<double> delivered(E, 0.0);
    for (int k = 0; k < U; ++k) {
        if (!connected[k]) continue;
        double r = demand_bps[k];
        double ok = 1.0;
        for (const auto& l : paths[k].links) {
            for (size_t e = 0; e < E; ++e) {
                if (graph.links[e].parent == l.parent && graph.links[e].child == l.child) {
                    r = std::min(r, ev.capacity_bps[e] / std::max(ev.sharing_users[e], 1));
                    ok *= 1.0 - ev.error_rate[e];
                }
            }
        }
        ev.user_throughput_bps[k] = r;
        ev.user_error_rate[k] = 1.0 - ok;
        ev.reward_mbps += r / 1e6;
        for (const auto& l : paths[k].links)
            for (size_t e = 0; e < E; ++e)
                if (graph.links[e].parent == l.parent && graph.links[e].child == l.child)
                    delivered[e] += r;
    }
    for (size_t e = 0; e < E; ++e)
        ev.delivered_airtime[e] =
            ev.rmax_bps[e] > 0.0 ? std::clamp(delivered[e] / ev.rmax_bps[e], 0.0, 1.0) : 0.0;
    return ev;
}

void World::step() {
    for (const auto& evn : timeline) {
        if (evn.epoch != epoch) continue;
        switch (evn.kind) {
            case EventKind::ActivateExternal:
            case EventKind::DeactivateExternal:
                for (auto& ap : externals)
                    if (ap.id == evn.ap_id)
                        ap.active = (evn.kind == EventKind::ActivateExternal);
                break;
            case EventKind::MoveUser:
                graph.nodes[evn.user].loc = grid.at(evn.target_grid);
                break;
            case EventKind::SetDemand:
                demand_bps[user_ordinal(evn.user)] = evn.demand_bps;
                break;
        }
    }

    LinkEval ev = evaluate();
    const double tau_s = tau_ms / 1000.0;
    for (size_t v = 0; v < graph.nodes.size(); ++v) {
        if (graph.is_user(static_cast<NodeId>(v))) continue;
        for (size_t d = 0; d < graph.nodes[v].radios.size(); ++d) {
            auto& rc = counters.radios[v][d];
            rc.cb_ms += ground_truth_utilization(graph.nodes[v].loc,
                                                 graph.nodes[v].radios[d].channel) /
                        100.0 * tau_ms;
            for (size_t e = 0; e < graph.links.size(); ++e) {
                const auto& l = graph.links[e];
                if (l.parent == static_cast<NodeId>(v) && l.parent_radio == static_cast<int>(d))
                    rc.chtx_ms += ev.delivered_airtime[e] * tau_ms;
                if (l.child == static_cast<NodeId>(v) && l.child_radio == static_cast<int>(d))
                    rc.chrx_ms += ev.delivered_airtime[e] * tau_ms;
            }
        }
    }
    for (int k = 0; k < graph.num_users(); ++k) {
        auto& uc = counters.users[k];
        double pack = demand_bps[k] * tau_s / (8.0 * kPacketBytes);
        double err = ev.user_error_rate[k];
        uc.n_pack += pack;
        uc.n_err += err * pack;
        uc.n_retr += std::min(err / std::max(1.0 - err, 1e-9), 1.0) * pack;
        uc.tx_bytes += ev.user_throughput_bps[k] * tau_s / 8.0;
        uc.rx_bytes += ev.user_throughput_bps[k] * tau_s / 8.0;
    }
    ++epoch;
}

Configuration World::snapshot_config() const {
    Configuration c;
    c.radio_channels.resize(graph.nodes.size());
    for (size_t v = 0; v < graph.nodes.size(); ++v)
        for (const auto& r : graph.nodes[v].radios) c.radio_channels[v].push_back(r.channel);
    for (const auto& l : graph.links) c.link_channels.push_back(l.channel);
    for (const auto& n : graph.nodes) c.node_locations.push_back(n.loc);
    return c;
}

void World::restore_config(const Configuration& c) {
    for (size_t v = 0; v < graph.nodes.size(); ++v)
        for (size_t d = 0; d < graph.nodes[v].radios.size(); ++d)
            graph.nodes[v].radios[d].channel = c.radio_channels[v][d];
    for (size_t e = 0; e < graph.links.size(); ++e) graph.links[e].channel = c.link_channels[e];
    for (size_t v = 0; v < graph.nodes.size(); ++v) graph.nodes[v].loc = c.node_locations[v];
}

void World::set_node_channels(NodeId node, const std::vector<int>& channels) {
    // Worklist propagation: retuning a radio drags every link it serves,
    // and through those links the peer radios, onto the same channel.
    std::deque<std::tuple<NodeId, int, int>> work;
    for (size_t d = 0; d < channels.size(); ++d)
        work.emplace_back(node, static_cast<int>(d), channels[d]);
    while (!work.empty()) {
        auto [v, d, ch] = work.front();
        work.pop_front();
        graph.nodes[v].radios[d].channel = ch;
        for (auto& l : graph.links) {
            if (l.parent == v && l.parent_radio == d && l.channel != ch) {
                l.channel = ch;
                if (graph.nodes[l.child].radios[l.child_radio].channel != ch)
                    work.emplace_back(l.child, l.child_radio, ch);
            }
            if (l.child == v && l.child_radio == d && l.channel != ch) {
                l.channel = ch;
                if (graph.nodes[l.parent].radios[l.parent_radio].channel != ch)
                    work.emplace_back(l.parent, l.parent_radio, ch);
            }
        }
    }
}

ApplyOutcome World::apply_action(const Action& a, const Configuration* revert_to) {
    ApplyOutcome out;
    Configuration before = snapshot_config();

    if (a.kind == ActionKind::ChannelConfig) {
        if (a.node < 0 || graph.is_user(a.node) ||
            a.channels.size() != graph.nodes[a.node].radios.size()) {
            out.status = ApplyOutcome::Rejected;
            out.violations.push_back({'b', a.node, "channel tuple does not match radio count"});
            return out;
        }
        for (int ch : a.channels) {
            if (ch < 1 || ch > graph.n_channels) {
                out.status = ApplyOutcome::Rejected;
                out.violations.push_back({'a', a.node, "channel outside [1,N]"});
                return out;
            }
        }
        set_node_channels(a.node, a.channels);
    } else {
        if (graph.nodes[a.node].role != NodeRole::Extender) {
            out.status = ApplyOutcome::Rejected;
            out.violations.push_back({'?', a.node, "only extenders can be repositioned"});
            return out;
        }
        if (a.target_grid < 1 || a.target_grid > grid.size()) {
            out.status = ApplyOutcome::Rejected;
            out.violations.push_back({'?', a.node, "target location outside area"});
            return out;
        }
        graph.nodes[a.node].loc = grid.at(a.target_grid);
    }

    auto violations = validate_constraints(graph);
    if (!violations.empty()) {
        restore_config(before);
        out.status = ApplyOutcome::Rejected;
        out.violations = std::move(violations);
        return out;
    }

    // Failed re-establishment proxy: a link channel saturated by foreign
    // traffic at either endpoint within the re-establish window. The
    // endpoints' own transmissions pause during re-association, so only
    // third-party airtime counts.
    for (int e : graph.links_of(a.node)) {
        const auto& l = graph.links[e];
        double up = foreign_utilization(l, graph.nodes[l.parent].loc);
        double uc = foreign_utilization(l, graph.nodes[l.child].loc);
        if (std::max(up, uc) >= 98.0) {
            out.status = ApplyOutcome::ReestablishFailed;
            out.saturated_channels.push_back(l.channel);
        }
    }
    if (out.status == ApplyOutcome::ReestablishFailed) {
        restore_config(revert_to ? *revert_to : before);
        return out;
    }
    return out;
}

double World::measure_rssi(NodeId tx, const Location& rx) const {
    if (graph.nodes[tx].radios.empty())
        throw std::invalid_argument("measure_rssi: node has no radio");
    return rssi_at(graph.nodes[tx].loc, rx, phy);
}

}  // namespace icalo
