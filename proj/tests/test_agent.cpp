#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "icalo/agent.hpp"

using namespace icalo;

namespace {
Action act(std::vector<int> ch) { return Action{ActionKind::ChannelConfig, 1, std::move(ch), -1}; }
}

TEST_CASE("action type selection") {
    AgentParams p;
    p.q_target = 20.0;
    p.thresholds.rssi_min = -65.0;
    CHECK(select_action_type(false, -70.0, 100.0, p) == ActionType::Reposition);
    CHECK(select_action_type(false, -56.0, 25.0, p) == ActionType::ChannelPhase);
    CHECK(select_action_type(false, -56.0, 10.0, p) == ActionType::Reposition);
    CHECK(select_action_type(true, -90.0, 0.0, p) == ActionType::ChannelPhase);
}

TEST_CASE("proposed location is the grid midpoint toward the parent") {
    Grid g(Rect{0, 0, 20, 10}, 1.0);
    std::mt19937_64 rng(7);
    Location ext = g.at(g.snap(16, 5));
    Location map = g.at(g.snap(0, 5));
    int mid = propose_location(g, ext, map, {}, rng);
    CHECK(g.at(mid).x == doctest::Approx(8.0));
    CHECK(g.at(mid).y == doctest::Approx(5.0));

    SUBCASE("visited midpoint forces a nearby alternative") {
        int alt = propose_location(g, ext, map, {mid}, rng);
        CHECK(alt != mid);
        // offset radius is two cells, plus up to half a diagonal of snapping
        CHECK(distance(g.at(alt), g.at(mid)) <= 3.0);
    }

    SUBCASE("adjacent to the parent still yields a distinct cell") {
        Location near = g.at(g.snap(1, 5));
        int t = propose_location(g, near, map, {}, rng);
        CHECK(t != near.grid_index);
    }
}

TEST_CASE("zero-cost exploration maximizes distance to visited actions") {
    World w = testing::chain_world();
    auto actions = enumerate_channel_actions(1, w.graph, 11);
    QTable q;
    q.set(1, 5, act({1, 1}), 4.0);  // visited
    std::mt19937_64 rng(3);
    Action a = zero_cost_explore(actions, q, 1, 5, rng);
    CHECK(a.channels == std::vector<int>{11, 11});
    CHECK(euclidean_channel_distance({1, 1}, {11, 11}) == doctest::Approx(std::sqrt(200.0)));

    SUBCASE("exhausted space draws uniformly but reproducibly") {
        for (const auto& c : actions) q.set(1, 5, c, 1.0);
        std::mt19937_64 r1(9), r2(9);
        CHECK(zero_cost_explore(actions, q, 1, 5, r1) ==
              zero_cost_explore(actions, q, 1, 5, r2));
    }
}

TEST_CASE("vdbe f and the epsilon update") {
    CHECK(vdbe_f(100.0, 100.0) == doctest::Approx(0.462117).epsilon(1e-6));
    CHECK(vdbe_f(0.0, 100.0) == doctest::Approx(0.0));
    CHECK(vdbe_f(1e9, 100.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(vdbe_f(1.0, 0.0), std::invalid_argument);

    double psi = 1.0 / 121.0;
    CHECK(exploration_probability_update(0.5, 0.0, 0.7, 100.0, psi) ==
          doctest::Approx(0.5 * (1.0 - psi)));
    // eta*delta = 100 reproduces the f hand value inside the blend
    double eps = exploration_probability_update(0.2, 100.0 / 0.7, 0.7, 100.0, psi);
    CHECK(eps == doctest::Approx(psi * 0.462117 + (1 - psi) * 0.2).epsilon(1e-5));
}

TEST_CASE("epsilon stays within [0,1] under arbitrary updates") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1e4, 1e4);
    double eps = 1.0;
    for (int i = 0; i < 10000; ++i) {
        eps = exploration_probability_update(eps, d(rng), 0.7, 100.0, 1.0 / 121.0);
        CHECK(eps >= 0.0);
        CHECK(eps <= 1.0);
    }
}

TEST_CASE("channel diversity hand values") {
    CHECK(cd_of({1, 11}) == doctest::Approx(21.0));
    CHECK(cd_of({7, 7}) == doctest::Approx(1.0));
    CHECK(cd_of({5}) == doctest::Approx(1.0));
    CHECK(cd_of({3, 8}) == doctest::Approx(11.0));
}

TEST_CASE("utilization impact sums the per-radio table entries") {
    ChannelLocationTable cl;
    cl.record(44, 3, 37.0);
    cl.record(44, 8, 35.0);
    CHECK(ui_of(cl, 44, {3, 8}) == doctest::Approx(72.0));
    CHECK(ui_of(cl, 44, {3, 7}) == doctest::Approx(37.0));  // unsensed adds 0
    CHECK(ui_of(cl, 9, {3, 8}) == doctest::Approx(0.0));
}

TEST_CASE("contention impact hand case") {
    ChannelLocationTable cl;
    cl.record(1, 1, 10.0);
    cl.record(1, 2, 20.0);
    cl.record(1, 4, 30.0);
    CHECK(ci_of(cl, 1, {3}, 11) == doctest::Approx(4.6).epsilon(1e-12));
}

TEST_CASE("hidden-node impact needs both endpoints sensed") {
    World w = testing::chain_world();
    ChannelLocationTable cl;
    int li = w.graph.nodes[1].loc.grid_index;
    int lj = w.graph.nodes[0].loc.grid_index;
    CHECK(hi_of(w.graph, 1, {3, 8}, cl) == doctest::Approx(0.0));  // nothing sensed
    cl.record(li, 3, 38.0);
    CHECK(hi_of(w.graph, 1, {3, 8}, cl) == doctest::Approx(0.0));  // peer missing
    cl.record(lj, 3, 37.0);
    CHECK(hi_of(w.graph, 1, {3, 8}, cl) == doctest::Approx(100.0));
}

TEST_CASE("kappa hand case and zero at the incumbent") {
    CHECK(kappa_of({3, 8}, {4, 10}) == doctest::Approx(29.068).epsilon(1e-3));
    CHECK(kappa_of({3, 8}, {3, 8}) == doctest::Approx(0.0));
}

TEST_CASE("boltzmann probabilities normalize and sharpen with cold T") {
    World w = testing::chain_world();
    auto actions = enumerate_channel_actions(1, w.graph, 11);
    QTable q;
    q.set(1, 5, act({4, 9}), 50.0);
    q.set(1, 5, act({2, 2}), 10.0);
    auto p = boltzmann_probabilities(actions, q, 1, 5, 50.0);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
    auto cold = boltzmann_probabilities(actions, q, 1, 5, 0.01);
    auto hot = boltzmann_probabilities(actions, q, 1, 5, 1e9);
    double cold_max = *std::max_element(cold.begin(), cold.end());
    CHECK(cold_max == doctest::Approx(1.0));
    CHECK(*std::max_element(hot.begin(), hot.end()) ==
          doctest::Approx(1.0 / actions.size()).epsilon(1e-3));
}

TEST_CASE("guided exploit keeps the 0.85 band and ranks by kappa") {
    AgentParams p;
    World w = testing::chain_world();
    auto actions = enumerate_channel_actions(1, w.graph, 11);
    QTable q;
    q.set(1, 5, act({6, 6}), 100.0);
    q.set(1, 5, act({1, 11}), 90.0);
    q.set(1, 5, act({5, 5}), 50.0);
    Action a = guided_exploit(1, 5, {6, 6}, actions, q, p);
    // both 100 and 90 survive the band; kappa prefers the diverse far tuple
    CHECK(a.channels == std::vector<int>{1, 11});

    SUBCASE("single nonzero entry wins") {
        QTable q1;
        q1.set(1, 5, act({9, 2}), 10.0);
        CHECK(guided_exploit(1, 5, {6, 6}, actions, q1, p).channels ==
              std::vector<int>{9, 2});
    }
    SUBCASE("no knowledge keeps the incumbent") {
        QTable q0;
        CHECK(guided_exploit(1, 5, {6, 6}, actions, q0, p).channels ==
              std::vector<int>{6, 6});
    }
}

TEST_CASE("guided explore avoids channels known to be saturated") {
    AgentParams p;
    World w = testing::chain_world();
    int s = w.graph.nodes[1].loc.grid_index;
    auto actions = enumerate_channel_actions(1, w.graph, 11);
    KnowledgeBase kb;
    kb.chan_loc.record(s, 1, kUtilizationSentinel);
    kb.chan_loc.record(s, 2, 95.0);
    Action a = guided_explore(w.graph, 1, s, {1, 1}, actions, kb, 50.0, p);
    CHECK(a.channels != std::vector<int>{1, 1});
    for (int c : a.channels) CHECK(c > 2);
}

TEST_CASE("reward scaling leaves the exploit choice unchanged") {
    AgentParams p;
    World w = testing::chain_world();
    auto actions = enumerate_channel_actions(1, w.graph, 11);
    QTable q1, q2;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(1.0, 100.0);
    for (int i = 0; i < 40; ++i) {
        const auto& a = actions[(i * 7) % actions.size()];
        double v = d(rng);
        q1.set(1, 5, a, v);
        q2.set(1, 5, a, 1000.0 * v);
    }
    CHECK(guided_exploit(1, 5, {1, 1}, actions, q1, p) ==
          guided_exploit(1, 5, {1, 1}, actions, q2, p));
}

TEST_CASE("control gate applies unknowns and 15 percent improvements only") {
    CHECK(control_gate(0.0, 50.0, 1.15) == GateVerdict::Apply);
    CHECK(control_gate(11.0, 10.0, 1.15) == GateVerdict::Keep);
    CHECK(control_gate(12.0, 10.0, 1.15) == GateVerdict::Apply);
    CHECK(control_gate(11.5, 10.0, 1.15) == GateVerdict::Keep);  // strict inequality
}

TEST_CASE("agent decisions are deterministic per seed") {
    ScenarioSpec spec = testing::chain_spec();
    auto run = [&](uint64_t seed) {
        World w = build_world(spec);
        Agent agent(resolve_agent_params(spec), w, seed);
        for (int i = 0; i < 12; ++i) agent.decision_epoch(w);
        return agent;
    };
    Agent a = run(42), b = run(42);
    REQUIRE(a.log().size() == b.log().size());
    for (size_t i = 0; i < a.log().size(); ++i) {
        CHECK(a.log()[i].action == b.log()[i].action);
        CHECK(a.log()[i].verdict == b.log()[i].verdict);
        CHECK(a.log()[i].reward == b.log()[i].reward);
    }
    CHECK(a.epoch_rewards() == b.epoch_rewards());
}

TEST_CASE("zero-cost sweep fills the Q-table without net config change") {
    ScenarioSpec spec = testing::chain_spec();
    for (auto& u : spec.users) u.demand_mbps = 0.0;
    World w = build_world(spec);
    Configuration before = w.snapshot_config();
    AgentParams p = resolve_agent_params(spec);
    p.q_target = 0.0;  // keep policy 1 quiet; this exercises policy 2 alone
    Agent agent(p, w, 1);
    size_t known = 0;
    for (int i = 0; i < 10; ++i) {
        agent.decision_epoch(w);
        CHECK(w.snapshot_config() == before);  // revert contract
        size_t now = agent.kb().q.raw().size();
        CHECK(now >= known);
        known = now;
    }
    CHECK(known > 0);
}

TEST_CASE("constraints hold after every agent epoch") {
    ScenarioSpec spec = testing::chain_spec();
    World w = build_world(spec);
    Agent agent(resolve_agent_params(spec), w, 17);
    for (int i = 0; i < 30; ++i) {
        agent.decision_epoch(w);
        CHECK(validate_constraints(w.graph).empty());
        CHECK(agent.epsilon(0) >= 0.0);
        CHECK(agent.epsilon(0) <= 1.0);
        CHECK(agent.epsilon(1) >= 0.0);
        CHECK(agent.epsilon(1) <= 1.0);
    }
}
