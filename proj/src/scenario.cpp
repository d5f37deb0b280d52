#include "icalo/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace icalo {

using nlohmann::json;

namespace {

Rect parse_rect(const json& j, Rect def) {
    Rect r = def;
    if (j.contains("x0")) r.x0 = j["x0"];
    if (j.contains("y0")) r.y0 = j["y0"];
    r.width = j.value("width", def.width);
    r.height = j.value("height", def.height);
    return r;
}

EventKind parse_event_kind(const std::string& s) {
    if (s == "activate") return EventKind::ActivateExternal;
    if (s == "deactivate") return EventKind::DeactivateExternal;
    if (s == "move_user") return EventKind::MoveUser;
    if (s == "set_demand") return EventKind::SetDemand;
    throw std::runtime_error("unknown event kind '" + s + "'");
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
    json j = json::parse(json_text);
    ScenarioSpec s;
    if (j.contains("area")) s.area = parse_rect(j["area"], s.area);
    if (j.contains("enclosure")) s.enclosure = parse_rect(j["enclosure"], s.enclosure);
    s.grid_spacing = j.value("grid_spacing", s.grid_spacing);
    s.n_channels = j.value("channels", s.n_channels);
    s.tau_ms = j.value("tau_ms", s.tau_ms);
    s.epochs = j.value("epochs", s.epochs);

    if (j.contains("phy")) {
        const auto& p = j["phy"];
        s.phy.tx_power_dbm = p.value("tx_power_dbm", s.phy.tx_power_dbm);
        s.phy.p_adjust_db = p.value("p_adjust_db", s.phy.p_adjust_db);
        s.phy.max_bps = p.value("max_bps", s.phy.max_bps);
        s.phy.max_nss = p.value("max_nss", s.phy.max_nss);
        s.phy.n_ofdm = p.value("n_ofdm", s.phy.n_ofdm);
        s.phy.ppdu_s = p.value("ppdu_s", s.phy.ppdu_s);
        s.phy.path_loss_exp = p.value("path_loss_exp", s.phy.path_loss_exp);
        s.phy.pl_ref_db = p.value("pl_ref_db", s.phy.pl_ref_db);
        s.phy.cca_threshold_dbm = p.value("cca_threshold_dbm", s.phy.cca_threshold_dbm);
        s.phy.extra_loss_db_per_m = p.value("extra_loss_db_per_m", s.phy.extra_loss_db_per_m);
    }

    if (j.contains("map")) {
        const auto& m = j["map"];
        s.map.x = m.value("x", s.map.x);
        s.map.y = m.value("y", s.map.y);
        s.map.radios = m.value("radios", s.map.radios);
        s.map.channel = m.value("channel", s.map.channel);
    }
    for (const auto& e : j.value("extenders", json::array())) {
        ScenarioSpec::ExtSpec x;
        x.x = e.value("x", x.x);
        x.y = e.value("y", x.y);
        x.backhaul_channel = e.value("backhaul_channel", x.backhaul_channel);
        x.fronthaul_channel = e.value("fronthaul_channel", x.fronthaul_channel);
        s.extenders.push_back(x);
    }
    for (const auto& u : j.value("users", json::array())) {
        ScenarioSpec::UserSpec x;
        x.x = u.value("x", x.x);
        x.y = u.value("y", x.y);
        x.demand_mbps = u.value("demand_mbps", x.demand_mbps);
        if (u.contains("attach")) {
            const auto& a = u["attach"];
            if (a.is_string()) {
                std::string as = a;
                x.attach = (as == "map") ? -1 : std::stoi(as.substr(3));  // "extK"
            } else {
                x.attach = a;
            }
        }
        s.users.push_back(x);
    }
    for (const auto& e : j.value("externals", json::array())) {
        ScenarioSpec::ExternalSpec x;
        x.id = e.value("id", std::string("ap") + std::to_string(s.externals.size()));
        x.x = e.value("x", x.x);
        x.y = e.value("y", x.y);
        x.channel = e.value("channel", x.channel);
        x.client_x = e.value("client_x", x.x + 1.0);
        x.client_y = e.value("client_y", x.y);
        x.offered_mbps = e.value("offered_mbps", x.offered_mbps);
        x.active = e.value("active", true);
        s.externals.push_back(x);
    }
    for (const auto& e : j.value("events", json::array())) {
        TimedEvent t;
        t.epoch = e.value("epoch", 0L);
        t.kind = parse_event_kind(e.at("kind"));
        t.ap_id = e.value("ap", std::string());
        t.user = e.value("user", -1);
        t.target_grid = e.value("target_grid", -1);
        t.demand_bps = e.value("demand_mbps", 0.0) * 1e6;
        s.events.push_back(t);
    }

    if (j.contains("agent")) {
        const auto& a = j["agent"];
        s.agent.eta = a.value("eta", s.agent.eta);
        s.agent.gamma = a.value("gamma", s.agent.gamma);
        s.agent.epsilon0 = a.value("epsilon0", s.agent.epsilon0);
        s.agent.temperature0 = a.value("temperature", s.agent.temperature0);
        s.agent.sigma = a.value("sigma", s.agent.sigma);
        s.agent.q_target = a.value("q_target_mbps", s.agent.q_target);
        s.agent.improvement_gate = a.value("improvement_gate", s.agent.improvement_gate);
        s.agent.exploit_band = a.value("exploit_band", s.agent.exploit_band);
        s.agent.prob_band = a.value("prob_band", s.agent.prob_band);
        s.agent.thresholds.u_thr = a.value("u_thr", s.agent.thresholds.u_thr);
        s.agent.thresholds.retr_thr = a.value("retr_thr", s.agent.thresholds.retr_thr);
        s.agent.thresholds.err_thr = a.value("err_thr", s.agent.thresholds.err_thr);
        s.agent.thresholds.rssi_min = a.value("rssi_min_dbm", s.agent.thresholds.rssi_min);
        s.agent.sentinel.samples_per_decision =
            a.value("samples_per_decision", s.agent.sentinel.samples_per_decision);
    }
    return s;
}

ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open scenario file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str());
}

World build_world(const ScenarioSpec& spec) {
    World w;
    w.grid = Grid(spec.area, spec.grid_spacing);
    w.phy = spec.phy;
    w.tau_ms = spec.tau_ms;
    w.sentinel = spec.agent.sentinel;
    w.graph.area = spec.area;
    w.graph.n_channels = spec.n_channels;

    auto snapped = [&](double x, double y) {
        Location l;
        l.x = x;
        l.y = y;
        l.grid_index = spec.area.contains(x, y) ? w.grid.snap(x, y) : 0;
        return l;
    };

    int backhaul_ch = spec.map.channel > 0
                          ? spec.map.channel
                          : (spec.extenders.empty() ? 1 : spec.extenders[0].backhaul_channel);

    NodeRec map;
    map.role = NodeRole::Map;
    map.loc = snapped(spec.map.x, spec.map.y);
    map.radios.assign(std::max(spec.map.radios, 1), Radio{backhaul_ch});
    w.graph.nodes.push_back(map);

    for (const auto& e : spec.extenders) {
        NodeRec ext;
        ext.role = NodeRole::Extender;
        ext.loc = snapped(e.x, e.y);
        ext.radios = {Radio{backhaul_ch}, Radio{e.fronthaul_channel}};
        w.graph.nodes.push_back(ext);
    }
    for (const auto& u : spec.users) {
        NodeRec usr;
        usr.role = NodeRole::User;
        usr.loc = snapped(u.x, u.y);
        usr.radios = {Radio{1}};
        w.graph.nodes.push_back(usr);
        w.demand_bps.push_back(u.demand_mbps * 1e6);
    }

    for (size_t i = 0; i < spec.extenders.size(); ++i) {
        Link l;
        l.parent = 0;
        l.child = static_cast<NodeId>(1 + i);
        l.channel = backhaul_ch;
        l.parent_radio = 0;
        l.child_radio = 0;
        w.graph.links.push_back(l);
    }
    const int first_user = 1 + static_cast<int>(spec.extenders.size());
    for (size_t k = 0; k < spec.users.size(); ++k) {
        const auto& u = spec.users[k];
        Link l;
        l.child = static_cast<NodeId>(first_user + k);
        l.child_radio = 0;
        if (u.attach < 0) {
            l.parent = 0;
            l.parent_radio = 0;
            l.channel = backhaul_ch;
        } else {
            if (u.attach >= static_cast<int>(spec.extenders.size()))
                throw std::runtime_error("user attached to unknown extender");
            l.parent = 1 + u.attach;
            l.parent_radio = 1;
            l.channel = spec.extenders[u.attach].fronthaul_channel;
        }
        w.graph.nodes[l.child].radios[0].channel = l.channel;
        w.graph.links.push_back(l);
    }

    for (const auto& e : spec.externals) {
        ExternalAp ap;
        ap.id = e.id;
        ap.loc = Location{0, e.x, e.y};
        ap.channel = e.channel;
        ap.client_loc = Location{0, e.client_x, e.client_y};
        ap.offered_bps = e.offered_mbps * 1e6;
        ap.active = e.active;
        w.externals.push_back(ap);
    }
    w.timeline = spec.events;
    w.init_counters();

    auto violations = validate_constraints(w.graph);
    if (!violations.empty())
        throw std::runtime_error("scenario builds an invalid graph: " + violations[0].detail);
    return w;
}

AgentParams resolve_agent_params(const ScenarioSpec& spec) {
    AgentParams p = spec.agent;
    if (p.q_target <= 0.0) {
        double total = 0.0;
        for (const auto& u : spec.users) total += u.demand_mbps;
        p.q_target = 0.5 * total;
    }
    return p;
}

}  // namespace icalo
