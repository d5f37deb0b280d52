#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "icalo/core.hpp"
#include "icalo/environment.hpp"
#include "icalo/kb.hpp"
#include "icalo/perception.hpp"

namespace icalo {

struct AgentParams {
    double eta = 0.7;
    double gamma = 0.0;
    double epsilon0 = 1.0;        // initial per-node exploration probability
    double temperature0 = 50.0;
    double temp_decay = 0.95;     // per applied action, floored at temp_floor
    double temp_floor = 1.0;
    double sigma = 100.0;
    double improvement_gate = 1.15;
    double exploit_band = 0.85;
    double prob_band = 0.9;
    double q_target = 0.0;        // q' in reward units (Mbps)
    double denom_guard = 1e-9;    // rho_u denominator guard
    bool guided = true;           // false selects the UG-RL ablation
    TriggerThresholds thresholds;
    SentinelPolicy sentinel;
};

enum class ActionType { Reposition, ChannelPhase };

// Policy 1 gate: repositioning wins on poor backhaul coverage or an
// unpromising location. The mAP never repositions.
ActionType select_action_type(bool is_map, double backhaul_rssi, double max_q,
                              const AgentParams& p);

// Midway-toward-parent placement with a random offset when already visited.
int propose_location(const Grid& grid, const Location& current, const Location& parent,
                     const std::set<int>& visited, std::mt19937_64& rng);

// Policy 2 action choice: farthest unvisited channel tuple by total
// Euclidean distance to the visited set, or a uniform draw once the space
// is exhausted. `actions` must come from enumerate_channel_actions.
Action zero_cost_explore(const std::vector<Action>& actions, const QTable& q, NodeId node,
                         int state, std::mt19937_64& rng);

double euclidean_channel_distance(const std::vector<int>& a, const std::vector<int>& b);

// VDBE blend updating the per-node exploration probability.
double exploration_probability_update(double eps, double delta_q, double eta, double sigma,
                                      double psi);
double vdbe_f(double eta_delta_abs, double sigma);

// Guidance terms. Channel-location lookups that are empty contribute 0;
// the 1000 sentinel enters at face value.
double cd_of(const std::vector<int>& channels);
double ui_of(const ChannelLocationTable& cl, int grid_index, const std::vector<int>& channels);
double hi_of(const NetworkGraph& g, NodeId node, const std::vector<int>& channels,
             const ChannelLocationTable& cl);
double ci_of(const ChannelLocationTable& cl, int grid_index, const std::vector<int>& channels,
             int n_channels);
double kappa_of(const std::vector<int>& current, const std::vector<int>& candidate);

// Boltzmann probabilities over the action set (normalized to 1).
std::vector<double> boltzmann_probabilities(const std::vector<Action>& actions,
                                            const QTable& q, NodeId node, int state,
                                            double temperature);

// Policy 3 exploration branch (five-step modified BSmax selection).
Action guided_explore(const NetworkGraph& g, NodeId node, int state,
                      const std::vector<int>& current_channels,
                      const std::vector<Action>& actions, const KnowledgeBase& kb,
                      double temperature, const AgentParams& p);

// Policy 3 exploitation branch (0.85 band + kappa ranking).
Action guided_exploit(NodeId node, int state, const std::vector<int>& current_channels,
                      const std::vector<Action>& actions, const QTable& q,
                      const AgentParams& p);

enum class GateVerdict { Apply, Keep };
GateVerdict control_gate(double q_proposed, double q_current, double improvement_gate);

struct LogEntry {
    long epoch = 0;
    NodeId node = 0;
    int policy = 0;  // 1..4; 0 = passive Q refresh
    std::string action;
    std::string verdict;  // applied / kept / probe / reestablish-failed / rejected
    double reward = 0.0;
    double q = 0.0;
    double epsilon = 0.0;
};

class Agent {
  public:
    Agent(const AgentParams& p, const World& w, uint64_t seed);

    // One decision epoch: advance the world samples_per_decision sensing
    // epochs, perceive, then run policies 1-4 for each managed node.
    void decision_epoch(World& w);

    const KnowledgeBase& kb() const { return kb_; }
    KnowledgeBase& kb() { return kb_; }
    const std::vector<LogEntry>& log() const { return log_; }
    int applied_actions() const { return applied_actions_; }
    const std::vector<double>& epoch_rewards() const { return epoch_rewards_; }
    const std::vector<bool>& epoch_action_applied() const { return epoch_action_applied_; }
    const std::vector<std::vector<double>>& epoch_user_mbps() const { return epoch_user_mbps_; }
    double epsilon(NodeId v) const { return eps_[v]; }
    double temperature(NodeId v) const { return temp_[v]; }
    const Configuration& best_config() const { return best_config_; }

  private:
    bool node_triggered(const World& w, const PerceptionSnapshot& s, NodeId v) const;
    void zero_cost_probe(World& w, NodeId v);
    double measure_window(World& w);  // steps S epochs, refreshes snapshot

    AgentParams p_;
    KnowledgeBase kb_;
    std::mt19937_64 rng_;
    std::vector<double> eps_, temp_;
    std::vector<std::set<int>> visited_locs_;
    std::vector<std::pair<int, Action>> pending_arrival_;  // per node; state<0 = none
    PerceptionSnapshot snapshot_;
    double window_reward_ = 0.0;
    Configuration best_config_;
    double best_reward_ = -1.0;
    bool pending_applied_ = false;
    int applied_actions_ = 0;
    std::vector<LogEntry> log_;
    std::vector<double> epoch_rewards_;        // per sensing epoch objective (Mbps)
    std::vector<bool> epoch_action_applied_;   // per sensing epoch
    std::vector<std::vector<double>> epoch_user_mbps_;
};

}  // namespace icalo
