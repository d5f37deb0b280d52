#include "icalo/kb.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace icalo {

namespace {
// The action's own node field is redundant with the key; normalize it so
// lookups cannot miss over a mismatched copy.
Action keyed(NodeId node, const Action& a) {
    Action k = a;
    k.node = node;
    return k;
}
}  // namespace

double QTable::get(NodeId node, int state, const Action& a) const {
    auto it = table_.find(Key{node, state, keyed(node, a)});
    return it == table_.end() ? 0.0 : it->second;
}

void QTable::set(NodeId node, int state, const Action& a, double q) {
    table_[Key{node, state, keyed(node, a)}] = q;
}

double QTable::max_q(NodeId node, int state) const {
    double best = 0.0;
    for (const auto& [k, v] : table_)
        if (k.node == node && k.state == state) best = std::max(best, v);
    return best;
}

std::vector<std::pair<Action, double>> QTable::entries(NodeId node, int state) const {
    std::vector<std::pair<Action, double>> out;
    for (const auto& [k, v] : table_)
        if (k.node == node && k.state == state) out.emplace_back(k.action, v);
    return out;
}

double q_update(QTable& q, NodeId node, int state, const Action& a, double reward,
                double eta, double gamma, std::optional<int> successor_state) {
    if (eta < 0.0 || eta > 1.0 || gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("q_update: eta and gamma must lie in [0,1]");
    double old = q.get(node, state, a);
    double future = gamma > 0.0 ? gamma * q.max_q(node, successor_state.value_or(state)) : 0.0;
    double updated = old + eta * (reward + future - old);
    q.set(node, state, a, updated);
    return updated;
}

void ChannelLocationTable::record(int grid_index, int channel, double utilization) {
    bool valid = (utilization >= 0.0 && utilization <= 100.0) ||
                 utilization == kUtilizationSentinel;
    if (!valid)
        throw std::invalid_argument("utilization must be in [0,100] or the 1000 sentinel");
    table_[{grid_index, channel}] = utilization;  // latest wins
}

std::optional<double> ChannelLocationTable::get(int grid_index, int channel) const {
    auto it = table_.find({grid_index, channel});
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

Action parse_action(const std::string& s, int line_no) {
    Action a;
    if (s.rfind("C:", 0) == 0) {
        a.kind = ActionKind::ChannelConfig;
        std::stringstream ss(s.substr(2));
        std::string tok;
        while (std::getline(ss, tok, ',')) a.channels.push_back(std::stoi(tok));
        if (a.channels.empty())
            throw std::runtime_error("kb load error at line " + std::to_string(line_no) +
                                     ": empty channel tuple");
    } else if (s.rfind("L:", 0) == 0) {
        a.kind = ActionKind::Reposition;
        a.target_grid = std::stoi(s.substr(2));
    } else {
        throw std::runtime_error("kb load error at line " + std::to_string(line_no) +
                                 ": bad action field '" + s + "'");
    }
    return a;
}

}  // namespace

void persist(const KnowledgeBase& kb, std::ostream& os) {
    os << "icalo-kb 1\n";
    os << "[q]\n";
    for (const auto& [k, v] : kb.q.raw())
        os << k.node << " " << k.state << " " << to_string(k.action) << " "
           << format_double(v) << "\n";
    os << "[chanloc]\n";
    for (const auto& [k, v] : kb.chan_loc.raw())
        os << k.first << " " << k.second << " " << format_double(v) << "\n";
    os << "[perc-radio]\n";
    const auto& snap = kb.perception.latest;
    for (size_t v = 0; v < snap.radios.size(); ++v)
        for (size_t d = 0; d < snap.radios[v].size(); ++d)
            os << v << " " << d << " " << snap.radios[v][d].channel << " "
               << format_double(snap.radios[v][d].utilization) << " "
               << format_double(snap.radios[v][d].activity) << "\n";
    os << "[perc-user]\n";
    for (size_t k = 0; k < snap.users.size(); ++k)
        os << k << " " << format_double(snap.users[k].retries_rate) << " "
           << format_double(snap.users[k].error_rate) << " " << (snap.users[k].no_traffic ? 1 : 0)
           << "\n";
    os << "[perc-rssi]\n";
    for (size_t v = 0; v < snap.backhaul_rssi.size(); ++v)
        os << v << " " << format_double(snap.backhaul_rssi[v]) << "\n";
    os << "[end]\n";
}

KnowledgeBase restore(std::istream& is) {
    KnowledgeBase kb;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& why) {
        throw std::runtime_error("kb load error at line " + std::to_string(line_no) + ": " + why);
    };

    if (!std::getline(is, line) || line != "icalo-kb 1") fail("missing header");
    line_no = 1;

    std::string section;
    bool ended = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line;
            if (section == "[end]") ended = true;
            continue;
        }
        std::istringstream ss(line);
        if (section == "[q]") {
            int node, state;
            std::string act, qs;
            if (!(ss >> node >> state >> act >> qs)) fail("bad q row");
            Action a = parse_action(act, line_no);
            a.node = node;  // the owning node is not part of the action text
            kb.q.set(node, state, a, std::stod(qs));
        } else if (section == "[chanloc]") {
            int gi, ch;
            std::string vs;
            if (!(ss >> gi >> ch >> vs)) fail("bad chanloc row");
            kb.chan_loc.record(gi, ch, std::stod(vs));
        } else if (section == "[perc-radio]") {
            size_t v, d;
            int ch;
            double u, rho;
            if (!(ss >> v >> d >> ch >> u >> rho)) fail("bad perc-radio row");
            auto& snap = kb.perception.latest;
            if (snap.radios.size() <= v) snap.radios.resize(v + 1);
            if (snap.radios[v].size() <= d) snap.radios[v].resize(d + 1);
            snap.radios[v][d] = {ch, u, rho};
        } else if (section == "[perc-user]") {
            size_t k;
            double rr, er;
            int nt;
            if (!(ss >> k >> rr >> er >> nt)) fail("bad perc-user row");
            auto& snap = kb.perception.latest;
            if (snap.users.size() <= k) snap.users.resize(k + 1);
            snap.users[k] = {rr, er, nt != 0};
        } else if (section == "[perc-rssi]") {
            size_t v;
            std::string vs;
            if (!(ss >> v >> vs)) fail("bad perc-rssi row");
            auto& snap = kb.perception.latest;
            if (snap.backhaul_rssi.size() <= v) snap.backhaul_rssi.resize(v + 1);
            kb.perception.latest.backhaul_rssi[v] = std::stod(vs);
        } else {
            fail("row outside any known section");
        }
    }
    if (!ended) fail("truncated file: no [end] marker");
    // nodes without radios (users) leave no rows; the rssi section still
    // carries one row per node, so it fixes the table length
    auto& snap = kb.perception.latest;
    if (snap.radios.size() < snap.backhaul_rssi.size())
        snap.radios.resize(snap.backhaul_rssi.size());
    return kb;
}

void persist_file(const KnowledgeBase& kb, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    persist(kb, os);
}

KnowledgeBase restore_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return restore(is);
}

namespace {
bool same_double(double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
}
}  // namespace

bool kb_equal(const KnowledgeBase& a, const KnowledgeBase& b) {
    if (!(a.q == b.q) || !(a.chan_loc == b.chan_loc)) return false;
    const auto& x = a.perception.latest;
    const auto& y = b.perception.latest;
    if (x.radios.size() != y.radios.size() || x.users.size() != y.users.size() ||
        x.backhaul_rssi.size() != y.backhaul_rssi.size())
        return false;
    for (size_t v = 0; v < x.radios.size(); ++v) {
        if (x.radios[v].size() != y.radios[v].size()) return false;
        for (size_t d = 0; d < x.radios[v].size(); ++d) {
            if (x.radios[v][d].channel != y.radios[v][d].channel ||
                !same_double(x.radios[v][d].utilization, y.radios[v][d].utilization) ||
                !same_double(x.radios[v][d].activity, y.radios[v][d].activity))
                return false;
        }
    }
    for (size_t k = 0; k < x.users.size(); ++k) {
        if (!same_double(x.users[k].retries_rate, y.users[k].retries_rate) ||
            !same_double(x.users[k].error_rate, y.users[k].error_rate) ||
            x.users[k].no_traffic != y.users[k].no_traffic)
            return false;
    }
    for (size_t v = 0; v < x.backhaul_rssi.size(); ++v)
        if (!same_double(x.backhaul_rssi[v], y.backhaul_rssi[v])) return false;
    return true;
}

}  // namespace icalo
