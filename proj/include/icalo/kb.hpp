#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "icalo/core.hpp"
#include "icalo/perception.hpp"

namespace icalo {

constexpr double kUtilizationSentinel = 1000.0;

// Tabular Q-values keyed by (node, state = location grid index, action).
// A value of exactly 0 means "never visited".
class QTable {
  public:
    struct Key {
        NodeId node = 0;
        int state = 0;
        Action action;
        friend auto operator<=>(const Key&, const Key&) = default;
    };

    double get(NodeId node, int state, const Action& a) const;
    void set(NodeId node, int state, const Action& a, double q);

    // Max Q over all entries of (node, state); 0 when nothing is known.
    double max_q(NodeId node, int state) const;

    std::vector<std::pair<Action, double>> entries(NodeId node, int state) const;

    const std::map<Key, double>& raw() const { return table_; }
    friend bool operator==(const QTable&, const QTable&) = default;

  private:
    std::map<Key, double> table_;
};

// Textbook update Q += eta * (r + gamma * max_a' Q(successor,.) - Q).
// With gamma = 0 (the supported operating point) the successor term is
// inert; the gamma > 0 branch is experimental.
double q_update(QTable& q, NodeId node, int state, const Action& a, double reward,
                double eta, double gamma, std::optional<int> successor_state = {});

// Utilization per (location grid index, channel). Unsensed entries are
// absent, which is distinct from both 0 and the 1000 sentinel.
class ChannelLocationTable {
  public:
    void record(int grid_index, int channel, double utilization);
    std::optional<double> get(int grid_index, int channel) const;
    const std::map<std::pair<int, int>, double>& raw() const { return table_; }
    friend bool operator==(const ChannelLocationTable&, const ChannelLocationTable&) = default;

  private:
    std::map<std::pair<int, int>, double> table_;
};

struct PerceptionTable {
    PerceptionSnapshot latest;
};

struct KnowledgeBase {
    QTable q;
    ChannelLocationTable chan_loc;
    PerceptionTable perception;
};

// Plain-text columnar dump; restore(persist(kb)) preserves all three
// tables exactly, including the empty/0/1000 trichotomy.
void persist(const KnowledgeBase& kb, std::ostream& os);
KnowledgeBase restore(std::istream& is);

void persist_file(const KnowledgeBase& kb, const std::string& path);
KnowledgeBase restore_file(const std::string& path);

bool kb_equal(const KnowledgeBase& a, const KnowledgeBase& b);

}  // namespace icalo
