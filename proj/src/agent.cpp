#include "icalo/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icalo {

ActionType select_action_type(bool is_map, double backhaul_rssi, double max_q,
                              const AgentParams& p) {
    if (is_map) return ActionType::ChannelPhase;
    if (backhaul_rssi <= p.thresholds.rssi_min) return ActionType::Reposition;
    if (max_q < p.q_target) return ActionType::Reposition;
    return ActionType::ChannelPhase;
}

namespace {
int sgn(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }
}

int propose_location(const Grid& grid, const Location& current, const Location& parent,
                     const std::set<int>& visited, std::mt19937_64& rng) {
    double mx = (current.x + parent.x) / 2.0;
    double my = (current.y + parent.y) / 2.0;
    int target = grid.snap(mx, my);
    if (target == current.grid_index) {
        // midpoint snapped onto our own cell: step one cell toward the parent
        target = grid.snap(current.x + sgn(parent.x - current.x) * grid.spacing,
                           current.y + sgn(parent.y - current.y) * grid.spacing);
    }
    if (!visited.count(target)) return target;

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double radius = 2.0 * grid.spacing;
    for (int tries = 0; tries < 200; ++tries) {
        double ang = uni(rng) * 2.0 * M_PI;
        double r = radius * std::sqrt(uni(rng));
        double x = mx + r * std::cos(ang);
        double y = my + r * std::sin(ang);
        if (!grid.area.contains(x, y)) continue;
        int cand = grid.snap(x, y);
        if (cand != target && cand != current.grid_index) return cand;
    }
    return target;
}

double euclidean_channel_distance(const std::vector<int>& a, const std::vector<int>& b) {
    double s = 0.0;
    for (size_t d = 0; d < a.size(); ++d) {
        double dc = a[d] - b[d];
        s += dc * dc;
    }
    return std::sqrt(s);
}

Action zero_cost_explore(const std::vector<Action>& actions, const QTable& q, NodeId node,
                         int state, std::mt19937_64& rng) {
    std::vector<const Action*> unvisited;
    std::vector<const Action*> visited;
    for (const auto& a : actions) {
        if (q.get(node, state, a) == 0.0) unvisited.push_back(&a);
        else visited.push_back(&a);
    }
    if (unvisited.empty()) {
        std::uniform_int_distribution<size_t> pick(0, actions.size() - 1);
        return actions[pick(rng)];
    }
    const Action* best = unvisited.front();
    double best_beta = -1.0;
    for (const Action* a : unvisited) {
        double beta = 0.0;
        for (const Action* i : visited)
            beta += euclidean_channel_distance(a->channels, i->channels);
        if (beta > best_beta) {
            best_beta = beta;
            best = a;
        }
    }
    return *best;
}

double vdbe_f(double eta_delta_abs, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    double e = std::exp(-eta_delta_abs / sigma);
    return (1.0 - e) / (1.0 + e);
}

double exploration_probability_update(double eps, double delta_q, double eta, double sigma,
                                      double psi) {
    double f = vdbe_f(std::abs(eta * delta_q), sigma);
    return psi * f + (1.0 - psi) * eps;
}

double cd_of(const std::vector<int>& channels) {
    double cd = 1.0;
    for (size_t d = 0; d < channels.size(); ++d)
        for (size_t d2 = 0; d2 < channels.size(); ++d2)
            if (d != d2) cd += std::abs(channels[d] - channels[d2]);
    return cd;
}

double ui_of(const ChannelLocationTable& cl, int grid_index, const std::vector<int>& channels) {
    double ui = 0.0;
    for (int h : channels)
        if (auto u = cl.get(grid_index, h)) ui += *u;
    return ui;
}

double hi_of(const NetworkGraph& g, NodeId node, const std::vector<int>& channels,
             const ChannelLocationTable& cl) {
    double hi = 0.0;
    for (int e : g.links_of(node)) {
        const auto& l = g.links[e];
        int radio = (l.parent == node) ? l.parent_radio : l.child_radio;
        int h = channels[radio];
        NodeId peer = (l.parent == node) ? l.child : l.parent;
        auto ui_here = cl.get(g.nodes[node].loc.grid_index, h);
        auto ui_peer = cl.get(g.nodes[peer].loc.grid_index, h);
        // both sides must have been sensed for the asymmetry to be known
        if (ui_here && ui_peer) hi += std::abs(*ui_here - *ui_peer) * 100.0;
    }
    return hi;
}

double ci_of(const ChannelLocationTable& cl, int grid_index, const std::vector<int>& channels,
             int n_channels) {
    double ci = 0.0;
    for (int hd : channels) {
        for (int h = 1; h <= n_channels; ++h) {
            if (h == hd || std::abs(h - hd) > 5) continue;
            if (auto u = cl.get(grid_index, h)) ci += (5.0 - std::abs(h - hd)) * (*u);
        }
    }
    return ci / 50.0;
}

double kappa_of(const std::vector<int>& current, const std::vector<int>& candidate) {
    return cd_of(candidate) * euclidean_channel_distance(current, candidate);
}

std::vector<double> boltzmann_probabilities(const std::vector<Action>& actions,
                                            const QTable& q, NodeId node, int state,
                                            double temperature) {
    std::vector<double> p(actions.size());
    double qmax = -std::numeric_limits<double>::infinity();
    for (const auto& a : actions) qmax = std::max(qmax, q.get(node, state, a));
    double sum = 0.0;
    for (size_t i = 0; i < actions.size(); ++i) {
        p[i] = std::exp((q.get(node, state, actions[i]) - qmax) / temperature);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

namespace {

Action argmax_kappa(const std::vector<const Action*>& candidates,
                    const std::vector<int>& current_channels, const Action& fallback) {
    if (candidates.empty()) return fallback;
    const Action* best = candidates.front();
    double best_k = kappa_of(current_channels, best->channels);
    for (const Action* a : candidates) {
        double k = kappa_of(current_channels, a->channels);
        if (k > best_k) {  // ties break toward the lowest index
            best_k = k;
            best = a;
        }
    }
    return *best;
}

}  // namespace

Action guided_explore(const NetworkGraph& g, NodeId node, int state,
                      const std::vector<int>& current_channels,
                      const std::vector<Action>& actions, const KnowledgeBase& kb,
                      double temperature, const AgentParams& p) {
    auto rho_o = boltzmann_probabilities(actions, kb.q, node, state, temperature);
    std::vector<double> rho_u(actions.size());
    int grid_index = g.nodes[node].loc.grid_index;
    double usum = 0.0;
    for (size_t i = 0; i < actions.size(); ++i) {
        const auto& ch = actions[i].channels;
        double denom = ui_of(kb.chan_loc, grid_index, ch) + hi_of(g, node, ch, kb.chan_loc) +
                       ci_of(kb.chan_loc, grid_index, ch, g.n_channels) + p.denom_guard;
        rho_u[i] = cd_of(ch) / denom;
        usum += rho_u[i];
    }
    // Both terms enter as probability distributions; the interference score
    // is normalized before the pointwise min.
    std::vector<double> rho(actions.size());
    for (size_t i = 0; i < actions.size(); ++i) rho[i] = std::min(rho_o[i], rho_u[i] / usum);
    double rho_max = *std::max_element(rho.begin(), rho.end());
    double rho_min = p.prob_band * rho_max;
    std::vector<const Action*> band;
    for (size_t i = 0; i < actions.size(); ++i)
        if (rho[i] > rho_min) band.push_back(&actions[i]);
    if (band.empty())
        for (const auto& a : actions) band.push_back(&a);
    Action cur{ActionKind::ChannelConfig, node, current_channels, -1};
    return argmax_kappa(band, current_channels, cur);
}

Action guided_exploit(NodeId node, int state, const std::vector<int>& current_channels,
                      const std::vector<Action>& actions, const QTable& q,
                      const AgentParams& p) {
    Action cur{ActionKind::ChannelConfig, node, current_channels, -1};
    double qmax = 0.0;
    for (const auto& a : actions) qmax = std::max(qmax, q.get(node, state, a));
    if (qmax <= 0.0) return cur;  // nothing known yet
    double qmin = p.exploit_band * qmax;
    std::vector<const Action*> band;
    for (const auto& a : actions)
        if (q.get(node, state, a) > qmin) band.push_back(&a);
    return argmax_kappa(band, current_channels, cur);
}

GateVerdict control_gate(double q_proposed, double q_current, double improvement_gate) {
    if (q_proposed == 0.0) return GateVerdict::Apply;
    return q_proposed > improvement_gate * q_current ? GateVerdict::Apply : GateVerdict::Keep;
}

Agent::Agent(const AgentParams& p, const World& w, uint64_t seed)
    : p_(p), rng_(seed) {
    const size_t n = w.graph.nodes.size();
    eps_.assign(n, p.epsilon0);
    temp_.assign(n, p.temperature0);
    visited_locs_.assign(n, {});
    pending_arrival_.assign(n, {-1, Action{}});
    for (size_t v = 0; v < n; ++v)
        if (w.graph.nodes[v].role == NodeRole::Extender)
            visited_locs_[v].insert(w.graph.nodes[v].loc.grid_index);
}

double Agent::measure_window(World& w) {
    const int S = p_.sentinel.samples_per_decision;
    CounterBank start = w.counters;
    double sum = 0.0;
    for (int i = 0; i < S; ++i) {
        bool flag = (i == 0) && pending_applied_;
        pending_applied_ = false;
        w.step();
        auto ev = w.evaluate();
        double r = ev.reward_mbps;
        epoch_rewards_.push_back(r);
        epoch_action_applied_.push_back(flag);
        std::vector<double> um;
        for (double t : ev.user_throughput_bps) um.push_back(t / 1e6);
        epoch_user_mbps_.push_back(std::move(um));
        sum += r;
    }
    snapshot_ = make_snapshot(w, start, w.counters, S * w.tau_ms);
    window_reward_ = sum / S;
    return window_reward_;
}

bool Agent::node_triggered(const World& w, const PerceptionSnapshot& s, NodeId v) const {
    for (const auto& rp : s.radios[v]) {
        if (rp.utilization > p_.thresholds.u_thr &&
            rp.activity / std::max(rp.utilization, 1e-12) < p_.thresholds.rho_ratio)
            return true;
    }
    for (int k = 0; k < w.graph.num_users(); ++k) {
        NodeId u = w.graph.first_user() + k;
        if (w.graph.uplink_of(u) < 0) continue;
        bool on_path = false;
        for (const auto& l : path_of(u, w.graph).links)
            if (l.parent == v || l.child == v) on_path = true;
        if (!on_path) continue;
        if (s.users[k].retries_rate > p_.thresholds.retr_thr ||
            s.users[k].error_rate > p_.thresholds.err_thr)
            return true;
    }
    return false;
}

void Agent::zero_cost_probe(World& w, NodeId v) {
    for (double d : w.demand_bps)
        if (d > 0.0) throw std::logic_error("zero-cost exploration with active traffic");
    int s = w.graph.nodes[v].loc.grid_index;
    auto actions = enumerate_channel_actions(v, w.graph, w.graph.n_channels);
    Action a = zero_cost_explore(actions, kb_.q, v, s, rng_);
    Configuration before = w.snapshot_config();
    auto out = w.apply_action(a);
    LogEntry le{w.epoch, v, 2, to_string(a), "probe", 0.0, 0.0, eps_[v]};
    if (out.status == ApplyOutcome::Applied) {
        double r = measure_window(w);
        double q = q_update(kb_.q, v, s, a, r, p_.eta, p_.gamma);
        for (const auto& rp : snapshot_.radios[v])
            kb_.chan_loc.record(s, rp.channel, rp.utilization);
        w.restore_config(before);  // zero-cost contract: probe never sticks
        le.reward = r;
        le.q = q;
    } else if (out.status == ApplyOutcome::ReestablishFailed) {
        for (int ch : out.saturated_channels) kb_.chan_loc.record(s, ch, kUtilizationSentinel);
        le.verdict = "reestablish-failed";
    } else {
        le.verdict = "rejected";
    }
    log_.push_back(le);
}

void Agent::decision_epoch(World& w) {
    double reward = measure_window(w);
    correct_activity(snapshot_, w.graph, p_.thresholds.rho_ratio);
    kb_.perception.latest = snapshot_;

    for (size_t v = 0; v < w.graph.nodes.size(); ++v) {
        if (w.graph.is_user(static_cast<NodeId>(v))) continue;
        int gi = w.graph.nodes[v].loc.grid_index;
        for (const auto& rp : snapshot_.radios[v]) kb_.chan_loc.record(gi, rp.channel, rp.utilization);
    }

    if (reward >= best_reward_) {
        best_reward_ = reward;
        best_config_ = w.snapshot_config();
    }

    bool users_active = false;
    for (double d : w.demand_bps)
        if (d > 0.0) users_active = true;

    const int managed = 1 + w.graph.num_extenders();
    for (NodeId v = 0; v < managed; ++v) {
        int s = w.graph.nodes[v].loc.grid_index;
        auto actions = enumerate_channel_actions(v, w.graph, w.graph.n_channels);
        std::vector<int> cur_ch;
        for (const auto& r : w.graph.nodes[v].radios) cur_ch.push_back(r.channel);
        Action cur_act{ActionKind::ChannelConfig, v, cur_ch, -1};

        double old_q = kb_.q.get(v, s, cur_act);
        double delta = reward - old_q;  // gamma = 0 operating point
        if (p_.gamma > 0.0) delta += p_.gamma * kb_.q.max_q(v, s);
        double new_q = q_update(kb_.q, v, s, cur_act, reward, p_.eta, p_.gamma);
        if (pending_arrival_[v].first >= 0) {
            q_update(kb_.q, v, pending_arrival_[v].first, pending_arrival_[v].second, reward,
                     p_.eta, p_.gamma);
            pending_arrival_[v].first = -1;
        }
        double psi = 1.0 / actions.size();
        eps_[v] = exploration_probability_update(eps_[v], delta, p_.eta, p_.sigma, psi);

        // Policy 1
        Action astar;
        bool have = false;
        int policy = 0;
        if (select_action_type(v == 0, snapshot_.backhaul_rssi[v], kb_.q.max_q(v, s), p_) ==
            ActionType::Reposition) {
            int up = w.graph.uplink_of(v);
            const Location& parent_loc = w.graph.nodes[w.graph.links[up].parent].loc;
            astar = Action{ActionKind::Reposition, v, {}, -1};
            astar.target_grid =
                propose_location(w.grid, w.graph.nodes[v].loc, parent_loc, visited_locs_[v], rng_);
            have = true;
            policy = 1;
        }

        // Policy 2 replaces everything while the network carries no traffic
        if (!users_active) {
            zero_cost_probe(w, v);
            continue;
        }

        // Policy 3 (overrides a pending reposition, as in the main loop's order)
        if (node_triggered(w, snapshot_, v)) {
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            double xi = uni(rng_);
            if (p_.guided) {
                astar = (xi < eps_[v])
                            ? guided_explore(w.graph, v, s, cur_ch, actions, kb_, temp_[v], p_)
                            : guided_exploit(v, s, cur_ch, actions, kb_.q, p_);
            } else {
                if (xi < eps_[v]) {
                    auto probs = boltzmann_probabilities(actions, kb_.q, v, s, temp_[v]);
                    std::discrete_distribution<size_t> pick(probs.begin(), probs.end());
                    astar = actions[pick(rng_)];
                } else {
                    astar = cur_act;
                    double best = kb_.q.get(v, s, cur_act);
                    for (const auto& a : actions) {
                        double q = kb_.q.get(v, s, a);
                        if (q > best) {
                            best = q;
                            astar = a;
                        }
                    }
                }
            }
            have = true;
            policy = 3;
        }

        if (!have) {
            log_.push_back({w.epoch, v, 0, to_string(cur_act), "quiet", reward, new_q, eps_[v]});
            continue;
        }
        if (astar == cur_act) {
            log_.push_back({w.epoch, v, policy, to_string(astar), "kept", reward, new_q, eps_[v]});
            continue;
        }

        // Policy 4
        int prop_state = astar.kind == ActionKind::Reposition ? astar.target_grid : s;
        double q_prop = kb_.q.get(v, prop_state, astar);
        GateVerdict verdict =
            p_.guided ? control_gate(q_prop, kb_.q.get(v, s, cur_act), p_.improvement_gate)
                      : GateVerdict::Apply;
        if (verdict == GateVerdict::Keep) {
            log_.push_back({w.epoch, v, 4, to_string(astar), "kept", reward, q_prop, eps_[v]});
            continue;
        }

        auto out = w.apply_action(astar, best_reward_ >= 0.0 ? &best_config_ : nullptr);
        if (out.status == ApplyOutcome::Applied) {
            ++applied_actions_;
            pending_applied_ = true;
            temp_[v] = std::max(p_.temp_floor, p_.temp_decay * temp_[v]);
            if (astar.kind == ActionKind::Reposition) {
                visited_locs_[v].insert(astar.target_grid);
                pending_arrival_[v] = {astar.target_grid, astar};
                // carry the last configuration's utilization to the new spot
                for (const auto& rp : snapshot_.radios[v])
                    kb_.chan_loc.record(astar.target_grid, rp.channel, rp.utilization);
            }
            log_.push_back({w.epoch, v, policy, to_string(astar), "applied", reward, q_prop, eps_[v]});
        } else if (out.status == ApplyOutcome::ReestablishFailed) {
            for (int ch : out.saturated_channels)
                kb_.chan_loc.record(s, ch, kUtilizationSentinel);
            log_.push_back(
                {w.epoch, v, policy, to_string(astar), "reestablish-failed", reward, q_prop, eps_[v]});
        } else {
            log_.push_back({w.epoch, v, policy, to_string(astar), "rejected", reward, q_prop, eps_[v]});
        }
    }
}

}  // namespace icalo
