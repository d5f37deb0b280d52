#pragma once

#include <string>
#include <vector>

#include "icalo/agent.hpp"
#include "icalo/environment.hpp"

namespace icalo {

// Declarative description of one experiment setup. Loaded from a JSON
// scenario file (see README for the key schema) or built in code.
struct ScenarioSpec {
    Rect area{0.0, 0.0, 20.0, 10.0};
    Rect enclosure{-5.0, -5.0, 30.0, 20.0};
    double grid_spacing = 1.0;
    int n_channels = 11;
    double tau_ms = 2000.0;
    PhyParams phy;

    struct MapSpec {
        double x = 1.0, y = 5.0;
        int radios = 1;
        int channel = 0;  // 0 = follow the first extender's backhaul channel
    } map;

    struct ExtSpec {
        double x = 10.0, y = 5.0;
        int backhaul_channel = 1;
        int fronthaul_channel = 1;
    };
    std::vector<ExtSpec> extenders;

    struct UserSpec {
        double x = 0.0, y = 0.0;
        int attach = -1;  // -1 = mAP, otherwise extender ordinal
        double demand_mbps = 5.0;
    };
    std::vector<UserSpec> users;

    struct ExternalSpec {
        std::string id;
        double x = 0.0, y = 0.0;
        int channel = 1;
        double client_x = 0.0, client_y = 0.0;
        double offered_mbps = 5.0;
        bool active = true;
    };
    std::vector<ExternalSpec> externals;

    std::vector<TimedEvent> events;
    AgentParams agent;
    long epochs = 400;
};

ScenarioSpec load_scenario(const std::string& path);
ScenarioSpec parse_scenario(const std::string& json_text);

// Instantiates the world. The backhaul link channel is shared: the mAP
// radio and every extender backhaul radio end up on one channel (the mAP's
// configured channel, or the first extender's backhaul channel).
World build_world(const ScenarioSpec& spec);

// Agent parameters with q_target resolved (default: half the aggregate
// user demand in Mbps).
AgentParams resolve_agent_params(const ScenarioSpec& spec);

}  // namespace icalo
