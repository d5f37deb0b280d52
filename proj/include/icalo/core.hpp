#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace icalo {

// Node ordering: index 0 is the master AP, 1..M are extenders,
// M+1..M+U are user devices.
using NodeId = int;

enum class NodeRole { Map, Extender, User };

struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 0.0;
    double height = 0.0;

    bool contains(double x, double y) const {
        return x >= x0 && x <= x0 + width && y >= y0 && y <= y0 + height;
    }
};

struct Location {
    int grid_index = 0;  // 1-based candidate-grid index; 0 when off-grid
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Location&, const Location&) = default;
};

inline double distance(const Location& a, const Location& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Uniform candidate-location grid over the managed area. Indices are
// 1-based, row-major from (x0, y0).
struct Grid {
    Rect area;
    double spacing = 1.0;
    int cols = 0;
    int rows = 0;

    Grid() = default;
    Grid(Rect a, double s) : area(a), spacing(s) {
        cols = static_cast<int>(std::floor(area.width / spacing)) + 1;
        rows = static_cast<int>(std::floor(area.height / spacing)) + 1;
    }

    int size() const { return cols * rows; }

    Location at(int grid_index) const;
    int snap(double x, double y) const;  // nearest grid index, ties toward lower index
};

struct Radio {
    int channel = 1;
};

struct NodeRec {
    NodeRole role = NodeRole::User;
    std::vector<Radio> radios;
    Location loc;
};

// A directed link; `parent` is the next hop toward the mAP. The channel is
// a single shared attribute of the link: both endpoint radios are kept in
// sync with it.
struct Link {
    NodeId parent = 0;
    NodeId child = 0;
    int channel = 1;
    int parent_radio = 0;
    int child_radio = 0;
};

struct Path {
    NodeId user = 0;
    std::vector<Link> links;  // ordered from the mAP outward
};

enum class ActionKind { ChannelConfig, Reposition };

struct Action {
    ActionKind kind = ActionKind::ChannelConfig;
    NodeId node = 0;
    std::vector<int> channels;  // one per radio, ChannelConfig only
    int target_grid = -1;       // Reposition only

    friend auto operator<=>(const Action&, const Action&) = default;
};

std::string to_string(const Action& a);

struct NetworkGraph {
    std::vector<NodeRec> nodes;
    std::vector<Link> links;
    Rect area;
    int n_channels = 11;

    int num_extenders() const;
    int num_users() const;
    int first_user() const { return 1 + num_extenders(); }
    bool is_user(NodeId v) const { return nodes[v].role == NodeRole::User; }

    // Link whose child is `v`, or -1.
    int uplink_of(NodeId v) const;
    std::vector<int> links_of(NodeId v) const;  // indices of links touching v
};

struct Violation {
    char constraint = '?';  // 'a'..'d'
    int subject = -1;       // offending node (a..c) or link index (d)
    std::string detail;
};

// Channel-config action space for one managed node, in lexicographic
// channel order. Size is n_channels^(radio count).
std::vector<Action> enumerate_channel_actions(NodeId node, const NetworkGraph& g,
                                              int n_channels);

std::vector<Violation> validate_constraints(const NetworkGraph& g);

// Unique parent chain from `user` to node 0, ordered from the mAP outward.
// Throws std::runtime_error when the user is disconnected.
Path path_of(NodeId user, const NetworkGraph& g);

}  // namespace icalo
