#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icalo/core.hpp"
#include "icalo/phy.hpp"

namespace icalo {

struct ExternalAp {
    std::string id;
    Location loc;
    int channel = 1;
    Location client_loc;
    double offered_bps = 0.0;
    bool active = true;

    // offered_load / link_rmax toward the client, clamped to [0,1].
    double airtime(const PhyParams& p) const;
};

struct RadioCounters {
    double cb_ms = 0.0;    // channel busy time
    double chrx_ms = 0.0;  // receive time
    double chtx_ms = 0.0;  // transmit time
};

struct UserCounters {
    double n_retr = 0.0;
    double n_err = 0.0;
    double n_pack = 0.0;
    double tx_bytes = 0.0;
    double rx_bytes = 0.0;
};

struct CounterBank {
    std::vector<std::vector<RadioCounters>> radios;  // [node][radio]
    std::vector<UserCounters> users;                 // [user ordinal 0..U-1]
};

enum class EventKind { ActivateExternal, DeactivateExternal, MoveUser, SetDemand };

struct TimedEvent {
    long epoch = 0;
    EventKind kind = EventKind::ActivateExternal;
    std::string ap_id;       // Activate/Deactivate
    int user = -1;           // MoveUser/SetDemand (node index)
    int target_grid = -1;    // MoveUser
    double demand_bps = 0.0; // SetDemand
};

struct SentinelPolicy {
    double reestablish_timeout_s = 30.0;
    double sentinel_value = 1000.0;
    double max_wait_s = 120.0;
    int samples_per_decision = 4;
};

// Frozen channel/location state, used for revert-to-best.
struct Configuration {
    std::vector<std::vector<int>> radio_channels;  // [node][radio]
    std::vector<int> link_channels;
    std::vector<Location> node_locations;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct ApplyOutcome {
    enum Status { Applied, ReestablishFailed, Rejected } status = Applied;
    std::vector<Violation> violations;
    // Link channels whose post-action utilization crossed the failure
    // proxy; the caller records the 1000 sentinel for these.
    std::vector<int> saturated_channels;
};

// Steady-state evaluation of the current configuration.
struct LinkEval {
    std::vector<double> rmax_bps;       // per link
    std::vector<double> busy_fraction;  // at sender, foreign transmitters
    std::vector<double> error_rate;     // hidden-node collision probability
    std::vector<double> capacity_bps;   // rmax * (1-busy) * (1-err)
    std::vector<double> offered_airtime;  // offered load / rmax, clamped
    std::vector<double> delivered_airtime;  // delivered flow / rmax
    std::vector<int> sharing_users;     // user paths traversing each link
    std::vector<double> user_throughput_bps;  // per user ordinal
    std::vector<double> user_error_rate;      // per user ordinal
    double reward_mbps = 0.0;  // sum of delivered end-to-end throughputs
};

class World {
  public:
    NetworkGraph graph;
    Grid grid;
    PhyParams phy;
    std::vector<ExternalAp> externals;
    std::vector<double> demand_bps;  // per user ordinal
    std::vector<TimedEvent> timeline;
    SentinelPolicy sentinel;
    double tau_ms = 2000.0;
    long epoch = 0;
    CounterBank counters;

    void init_counters();

    struct Transmitter {
        Location loc;
        int channel = 1;
        double airtime = 0.0;
        NodeId node = -1;  // managed transmitter node, -1 for externals
        int link = -1;     // link index for managed transmitters
    };
    std::vector<Transmitter> transmitters() const;

    // Busy fraction sensed at `loc` on `channel`, in percent of [0,100].
    double ground_truth_utilization(const Location& loc, int channel) const;

    LinkEval evaluate() const;
    double objective_mbps() const { return evaluate().reward_mbps; }

    // Advance one sensing epoch: apply due timeline events, then
    // accumulate counters from the current steady-state evaluation.
    void step();

    // `revert_to` is the best-known configuration restored on failure.
    ApplyOutcome apply_action(const Action& a,
                              const Configuration* revert_to = nullptr);

    double measure_rssi(NodeId tx, const Location& rx) const;

    Configuration snapshot_config() const;
    void restore_config(const Configuration& c);

    int user_ordinal(NodeId v) const { return v - graph.first_user(); }

  private:
    double utilization_at(const Location& loc, int channel, NodeId exclude_node,
                          int exclude_link) const;
    double foreign_utilization(const Link& l, const Location& loc) const;
    void set_node_channels(NodeId node, const std::vector<int>& channels);
};

// 2.4 GHz adjacent-channel overlap kernel: max(0, (5-|dc|)/5).
double channel_overlap(int a, int b);

}  // namespace icalo
