#include "icalo/perception.hpp"

#include <algorithm>
#include <cmath>

namespace icalo {

double utilization_from_counters(double cb_t_ms, double cb_t_tau_ms, double tau_ms) {
    if (cb_t_tau_ms < cb_t_ms) throw CounterResetError("channel busy counter decreased");
    if (tau_ms <= 0.0) throw std::invalid_argument("tau must be positive");
    return std::clamp((cb_t_tau_ms - cb_t_ms) / tau_ms * 100.0, 0.0, 100.0);
}

double activity_from_counters(double chrx_t_ms, double chtx_t_ms, double chrx_t_tau_ms,
                              double chtx_t_tau_ms, double tau_ms) {
    if (chrx_t_tau_ms < chrx_t_ms || chtx_t_tau_ms < chtx_t_ms)
        throw CounterResetError("activity counter decreased");
    if (tau_ms <= 0.0) throw std::invalid_argument("tau must be positive");
    double delta = (chrx_t_tau_ms + chtx_t_tau_ms) - (chrx_t_ms + chtx_t_ms);
    return std::clamp(delta / tau_ms * 100.0, 0.0, 100.0);
}

RateResult retries_rate(double retr_delta, double pack_delta) {
    if (retr_delta < 0.0 || pack_delta < 0.0)
        throw CounterResetError("retries counter decreased");
    if (pack_delta <= 0.0) return {0.0, true};
    return {retr_delta / pack_delta * 100.0, false};
}

RateResult error_rate(double err_delta, double pack_delta) {
    if (err_delta < 0.0 || pack_delta < 0.0)
        throw CounterResetError("error counter decreased");
    if (pack_delta <= 0.0) return {0.0, true};
    return {err_delta / pack_delta * 100.0, false};
}

PerceptionSnapshot make_snapshot(const World& w, const CounterBank& prev,
                                 const CounterBank& cur, double window_ms) {
    PerceptionSnapshot s;
    const double tau = window_ms > 0.0 ? window_ms : w.tau_ms;
    const auto& g = w.graph;
    s.radios.resize(g.nodes.size());
    s.backhaul_rssi.assign(g.nodes.size(), std::nan(""));
    for (size_t v = 0; v < g.nodes.size(); ++v) {
        if (g.is_user(static_cast<NodeId>(v))) continue;
        for (size_t d = 0; d < g.nodes[v].radios.size(); ++d) {
            RadioPerception rp;
            rp.channel = g.nodes[v].radios[d].channel;
            rp.utilization = utilization_from_counters(prev.radios[v][d].cb_ms,
                                                       cur.radios[v][d].cb_ms, tau);
            rp.activity = activity_from_counters(prev.radios[v][d].chrx_ms,
                                                 prev.radios[v][d].chtx_ms,
                                                 cur.radios[v][d].chrx_ms,
                                                 cur.radios[v][d].chtx_ms, tau);
            s.radios[v].push_back(rp);
        }
        if (g.nodes[v].role == NodeRole::Extender) {
            int up = g.uplink_of(static_cast<NodeId>(v));
            if (up >= 0)
                s.backhaul_rssi[v] =
                    w.measure_rssi(static_cast<NodeId>(v), g.nodes[g.links[up].parent].loc);
        }
    }
    for (int k = 0; k < g.num_users(); ++k) {
        UserPerception up;
        auto rr = retries_rate(cur.users[k].n_retr - prev.users[k].n_retr,
                               cur.users[k].n_pack - prev.users[k].n_pack);
        auto er = error_rate(cur.users[k].n_err - prev.users[k].n_err,
                             cur.users[k].n_pack - prev.users[k].n_pack);
        up.retries_rate = rr.percent;
        up.error_rate = er.percent;
        up.no_traffic = rr.no_traffic;
        s.users.push_back(up);
    }
    return s;
}

void correct_activity(PerceptionSnapshot& s, const NetworkGraph& g, double rho_ratio) {
    for (const auto& l : g.links) {
        if (g.is_user(l.child)) continue;
        if (s.radios[l.parent].empty() || s.radios[l.child].empty()) continue;
        auto& child = s.radios[l.child][l.child_radio];
        const auto& parent = s.radios[l.parent][l.parent_radio];
        if (child.utilization > 0.0 && child.activity / child.utilization < rho_ratio &&
            parent.activity > child.activity) {
            child.activity = parent.activity;
        }
    }
}

TriggerState trigger(const PerceptionSnapshot& s, const TriggerThresholds& thr) {
    for (const auto& node : s.radios) {
        for (const auto& rp : node) {
            if (rp.utilization > thr.u_thr &&
                rp.activity / std::max(rp.utilization, 1e-12) < thr.rho_ratio)
                return TriggerState::Suboptimal;
        }
    }
    for (const auto& u : s.users) {
        if (u.retries_rate > thr.retr_thr || u.error_rate > thr.err_thr)
            return TriggerState::Suboptimal;
    }
    return TriggerState::Quiet;
}

}  // namespace icalo
