#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "icalo/agent.hpp"
#include "icalo/baselines.hpp"

using namespace icalo;

namespace {

Action random_action(const World& w, std::mt19937_64& rng) {
    const int managed = 1 + w.graph.num_extenders();
    std::uniform_int_distribution<int> pick_node(0, managed - 1);
    std::uniform_int_distribution<int> pick_ch(1, w.graph.n_channels);
    std::uniform_int_distribution<int> pick_kind(0, 9);
    NodeId v = pick_node(rng);
    Action a;
    a.node = v;
    if (pick_kind(rng) == 0 && w.graph.nodes[v].role == NodeRole::Extender) {
        a.kind = ActionKind::Reposition;
        std::uniform_int_distribution<int> pick_loc(1, w.grid.size());
        a.target_grid = pick_loc(rng);
    } else {
        a.kind = ActionKind::ChannelConfig;
        for (size_t d = 0; d < w.graph.nodes[v].radios.size(); ++d)
            a.channels.push_back(pick_ch(rng));
        if (pick_kind(rng) == 0) a.channels[0] = w.graph.n_channels + 3;  // invalid
    }
    return a;
}

}  // namespace

TEST_CASE("constraints survive ten thousand random actions") {
    World w = testing::chain_world();
    std::mt19937_64 rng(404);
    int applied = 0, failed = 0, rejected = 0;
    for (int i = 0; i < 10000; ++i) {
        auto out = w.apply_action(random_action(w, rng));
        switch (out.status) {
            case ApplyOutcome::Applied: ++applied; break;
            case ApplyOutcome::ReestablishFailed: ++failed; break;
            default: ++rejected; break;
        }
        auto viol = validate_constraints(w.graph);
        if (!viol.empty()) {
            CAPTURE(i);
            CAPTURE(viol[0].constraint);
            REQUIRE(viol.empty());
        }
    }
    // the action generator produces all three outcomes on this scenario
    CHECK(applied > 0);
    CHECK(rejected > 0);
    CHECK(applied + failed + rejected == 10000);
}

TEST_CASE("counters only ever grow") {
    World w = testing::chain_world();
    CounterBank prev = w.counters;
    for (int e = 0; e < 50; ++e) {
        w.step();
        const auto& c = w.counters;
        REQUIRE(c.radios.size() == prev.radios.size());
        for (size_t v = 0; v < c.radios.size(); ++v)
            for (size_t d = 0; d < c.radios[v].size(); ++d) {
                CHECK(c.radios[v][d].cb_ms >= prev.radios[v][d].cb_ms);
                CHECK(c.radios[v][d].chtx_ms >= prev.radios[v][d].chtx_ms);
                CHECK(c.radios[v][d].chrx_ms >= prev.radios[v][d].chrx_ms);
            }
        for (size_t k = 0; k < c.users.size(); ++k) {
            CHECK(c.users[k].n_pack >= prev.users[k].n_pack);
            CHECK(c.users[k].n_err >= prev.users[k].n_err);
            CHECK(c.users[k].n_retr >= prev.users[k].n_retr);
            CHECK(c.users[k].tx_bytes >= prev.users[k].tx_bytes);
            CHECK(c.users[k].rx_bytes >= prev.users[k].rx_bytes);
        }
        prev = c;
    }
}

TEST_CASE("utilization is bounded and falls when an external goes quiet") {
    World w = testing::chain_world();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> px(0.0, 20.0), py(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        Location loc{0, px(rng), py(rng)};
        int ch = 1 + trial % w.graph.n_channels;
        double u_on = w.ground_truth_utilization(loc, ch);
        CHECK(u_on >= 0.0);
        CHECK(u_on <= 100.0);
        World off = w;
        off.externals[0].active = false;
        CHECK(off.ground_truth_utilization(loc, ch) <= u_on + 1e-9);
    }
}

TEST_CASE("rssi decreases with distance") {
    PhyParams phy;
    Location tx{0, 0.0, 0.0};
    double last = 1e9;
    for (double d = 0.5; d <= 40.0; d += 0.5) {
        double r = rssi_at(tx, Location{0, d, 0.0}, phy);
        CHECK(r <= last + 1e-12);
        CHECK(r >= -100.0);
        CHECK(r <= 40.0);
        last = r;
    }
}

TEST_CASE("link rate is monotone in rssi and capped") {
    PhyParams phy;
    double last = 0.0;
    for (double rssi = -100.0; rssi <= 0.0; rssi += 0.5) {
        double r = link_rmax(rssi, phy);
        CHECK(r >= last - 1e-9);
        CHECK(r <= 65e6 + 1e-6);
        last = r;
    }
}

TEST_CASE("boltzmann output is always a distribution") {
    World w = testing::chain_world();
    auto actions = enumerate_channel_actions(1, w.graph, 11);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> qv(0.0, 500.0), tv(0.5, 200.0);
    for (int trial = 0; trial < 100; ++trial) {
        QTable q;
        for (int i = 0; i < 30; ++i)
            q.set(1, 5, actions[rng() % actions.size()], qv(rng));
        auto p = boltzmann_probabilities(actions, q, 1, 5, tv(rng));
        double sum = 0.0;
        for (double v : p) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("guidance scores stay nonnegative on random tables") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> ch(1, 11);
    std::uniform_real_distribution<double> uv(0.0, 100.0);
    for (int trial = 0; trial < 300; ++trial) {
        ChannelLocationTable cl;
        for (int i = 0; i < 8; ++i) cl.record(1 + int(rng() % 50), ch(rng), uv(rng));
        std::vector<int> tuple{ch(rng), ch(rng)};
        CHECK(cd_of(tuple) >= 1.0);
        CHECK(ui_of(cl, 1 + int(rng() % 50), tuple) >= 0.0);
        CHECK(ci_of(cl, 1 + int(rng() % 50), tuple, 11) >= 0.0);
        CHECK(kappa_of(tuple, tuple) == doctest::Approx(0.0));
    }
}

TEST_CASE("the exploration probability never leaves the unit interval") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dq(-1e6, 1e6), e0(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double eps = e0(rng);
        for (int i = 0; i < 200; ++i) {
            eps = exploration_probability_update(eps, dq(rng), 0.7, 100.0, 1.0 / 121.0);
            CHECK(eps >= 0.0);
            CHECK(eps <= 1.0);
        }
    }
}

TEST_CASE("brute force never loses to any uniform assignment") {
    World w = testing::chain_world();
    std::vector<int> chans{1, 4, 8, 11};
    auto r = brute_force_optimum(w, {w.graph.nodes[1].loc.grid_index}, chans);
    REQUIRE(r.found);
    for (int bh : chans)
        for (int fh : chans) {
            World trial = w;
            apply_uniform_assignment(trial, bh, fh);
            CHECK(r.best_objective_mbps >= trial.objective_mbps() - 1e-9);
        }
}

TEST_CASE("channel overlap is symmetric and shrinks with separation") {
    for (int a = 1; a <= 11; ++a)
        for (int b = 1; b <= 11; ++b) {
            CHECK(channel_overlap(a, b) == doctest::Approx(channel_overlap(b, a)));
            if (std::abs(a - b) >= 5) CHECK(channel_overlap(a, b) == doctest::Approx(0.0));
            if (b > a && b < 11)
                CHECK(channel_overlap(a, b + 1) <= channel_overlap(a, b) + 1e-12);
        }
    CHECK(channel_overlap(6, 6) == doctest::Approx(1.0));
}
