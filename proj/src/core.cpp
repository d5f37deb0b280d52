#include "icalo/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace icalo {

Location Grid::at(int grid_index) const {
    if (grid_index < 1 || grid_index > size())
        throw std::out_of_range("grid index out of range");
    int i = grid_index - 1;
    Location l;
    l.grid_index = grid_index;
    l.x = area.x0 + (i % cols) * spacing;
    l.y = area.y0 + (i / cols) * spacing;
    return l;
}

int Grid::snap(double x, double y) const {
    double cx = std::clamp(x, area.x0, area.x0 + (cols - 1) * spacing);
    double cy = std::clamp(y, area.y0, area.y0 + (rows - 1) * spacing);
    int ci = static_cast<int>(std::floor((cx - area.x0) / spacing + 0.5));
    int ri = static_cast<int>(std::floor((cy - area.y0) / spacing + 0.5));
    ci = std::clamp(ci, 0, cols - 1);
    ri = std::clamp(ri, 0, rows - 1);
    return ri * cols + ci + 1;
}

std::string to_string(const Action& a) {
    std::ostringstream os;
    if (a.kind == ActionKind::ChannelConfig) {
        os << "C:";
        for (size_t i = 0; i < a.channels.size(); ++i) {
            if (i) os << ",";
            os << a.channels[i];
        }
    } else {
        os << "L:" << a.target_grid;
    }
    return os.str();
}

int NetworkGraph::num_extenders() const {
    int m = 0;
    for (const auto& n : nodes)
        if (n.role == NodeRole::Extender) ++m;
    return m;
}

int NetworkGraph::num_users() const {
    int u = 0;
    for (const auto& n : nodes)
        if (n.role == NodeRole::User) ++u;
    return u;
}

int NetworkGraph::uplink_of(NodeId v) const {
    for (size_t i = 0; i < links.size(); ++i)
        if (links[i].child == v) return static_cast<int>(i);
    return -1;
}

std::vector<int> NetworkGraph::links_of(NodeId v) const {
    std::vector<int> out;
    for (size_t i = 0; i < links.size(); ++i)
        if (links[i].parent == v || links[i].child == v) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<Action> enumerate_channel_actions(NodeId node, const NetworkGraph& g,
                                              int n_channels) {
    if (node < 0 || node >= static_cast<int>(g.nodes.size()) || g.is_user(node))
        throw std::invalid_argument("enumerate_channel_actions: not a managed node");
    if (n_channels < 1) throw std::invalid_argument("n_channels must be >= 1");

    const int radios = static_cast<int>(g.nodes[node].radios.size());
    std::vector<Action> out;
    std::vector<int> tuple(radios, 1);
    while (true) {
        Action a;
        a.kind = ActionKind::ChannelConfig;
        a.node = node;
        a.channels = tuple;
        out.push_back(std::move(a));
        int d = radios - 1;
        for (; d >= 0; --d) {
            if (tuple[d] < n_channels) {
                ++tuple[d];
                std::fill(tuple.begin() + d + 1, tuple.end(), 1);
                break;
            }
        }
        if (d < 0) break;
    }
    return out;
}

std::vector<Violation> validate_constraints(const NetworkGraph& g) {
    std::vector<Violation> out;
    for (size_t v = 0; v < g.nodes.size(); ++v) {
        const auto& n = g.nodes[v];
        std::set<int> distinct;
        for (const auto& r : n.radios) {
            if (r.channel < 1 || r.channel > g.n_channels) {
                out.push_back({'a', static_cast<int>(v), "channel outside [1,N]"});
            }
            distinct.insert(r.channel);
        }
        // (b) one channel per radio holds structurally (Radio stores one
        // channel); (c) distinct channels cannot exceed radio count.
        if (distinct.size() > n.radios.size())
            out.push_back({'c', static_cast<int>(v), "more channels than radios"});
    }
    for (size_t e = 0; e < g.links.size(); ++e) {
        const auto& l = g.links[e];
        auto tuned = [&](NodeId v, int ch) {
            for (const auto& r : g.nodes[v].radios)
                if (r.channel == ch) return true;
            return false;
        };
        if (!tuned(l.parent, l.channel) || !tuned(l.child, l.channel)) {
            std::ostringstream os;
            os << "link (" << l.parent << "," << l.child << ") endpoints share no radio on channel "
               << l.channel;
            out.push_back({'d', static_cast<int>(e), os.str()});
        }
    }
    return out;
}

Path path_of(NodeId user, const NetworkGraph& g) {
    if (user < g.first_user() || user >= static_cast<int>(g.nodes.size()))
        throw std::invalid_argument("path_of: not a user node");
    std::vector<Link> rev;
    NodeId cur = user;
    while (cur != 0) {
        int up = g.uplink_of(cur);
        if (up < 0) throw std::runtime_error("path_of: user disconnected from mAP");
        rev.push_back(g.links[up]);
        cur = g.links[up].parent;
        if (rev.size() > g.nodes.size()) throw std::runtime_error("path_of: cycle detected");
    }
    Path p;
    p.user = user;
    p.links.assign(rev.rbegin(), rev.rend());
    return p;
}

}  // namespace icalo
