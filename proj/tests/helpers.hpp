#pragma once

#include <string>

#include "icalo/scenario.hpp"

namespace icalo::testing {

// mAP(1 radio) -> EXT(2 radios) -> user chain plus one mAP-attached user,
// with one co-channel external AP near the extender.
inline ScenarioSpec chain_spec() {
    return parse_scenario(R"({
      "area": {"x0": 0, "y0": 0, "width": 20, "height": 10},
      "channels": 11,
      "epochs": 240,
      "map": {"x": 1, "y": 5, "radios": 1},
      "extenders": [{"x": 10, "y": 5, "backhaul_channel": 1, "fronthaul_channel": 1}],
      "users": [
        {"x": 2, "y": 4, "attach": "map", "demand_mbps": 20},
        {"x": 15, "y": 5, "attach": "ext0", "demand_mbps": 20}
      ],
      "externals": [
        {"id": "cafe", "x": 12, "y": 8, "channel": 1, "client_x": 13, "client_y": 8,
         "offered_mbps": 60}
      ]
    })");
}

inline World chain_world() { return build_world(chain_spec()); }

}  // namespace icalo::testing
