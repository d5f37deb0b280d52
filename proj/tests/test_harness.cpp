#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "icalo/harness.hpp"

using namespace icalo;

TEST_CASE("convergence detection on canonical series") {
    std::vector<double> constant(40, 25.0);
    std::vector<bool> no_action(40, false);
    CHECK(detect_convergence(constant, no_action) == 0);

    std::vector<double> settle;
    for (int i = 0; i < 13; ++i) settle.push_back(5.0 + i);
    for (int i = 0; i < 27; ++i) settle.push_back(30.0);
    CHECK(detect_convergence(settle, std::vector<bool>(40, false)) == 13);

    std::vector<double> oscillating;
    for (int i = 0; i < 40; ++i) oscillating.push_back(i % 2 ? 40.0 : 10.0);
    CHECK(detect_convergence(oscillating, std::vector<bool>(40, false)) == -1);
}

TEST_CASE("an applied action inside the window postpones convergence") {
    std::vector<double> constant(40, 25.0);
    std::vector<bool> act(40, false);
    act[5] = true;
    CHECK(detect_convergence(constant, act) == 6);
}

TEST_CASE("short series shrink the window instead of failing") {
    std::vector<double> s(4, 12.0);
    CHECK(detect_convergence(s, std::vector<bool>(4, false)) == 0);
    CHECK_THROWS_AS(detect_convergence({}, {}), std::invalid_argument);
}

TEST_CASE("cdf deciles interpolate the sorted sample") {
    auto d = cdf_deciles({4.0, 1.0, 3.0, 2.0});
    REQUIRE(d.size() == 11);
    CHECK(d.front() == doctest::Approx(1.0));
    CHECK(d.back() == doctest::Approx(4.0));
    CHECK(d[5] == doctest::Approx(2.5));

    SUBCASE("order of the input does not matter") {
        CHECK(cdf_deciles({2.0, 4.0, 1.0, 3.0}) == d);
    }
    SUBCASE("a single value is a flat cdf") {
        for (double v : cdf_deciles({7.0})) CHECK(v == doctest::Approx(7.0));
    }
}

TEST_CASE("unknown scheme is rejected") {
    CHECK_THROWS_AS(run_single(testing::chain_spec(), "dijkstra", 1, 8),
                    std::invalid_argument);
}

TEST_CASE("passive schemes record a full flat series") {
    auto m = run_single(testing::chain_spec(), "single", 3, 20);
    CHECK(m.scheme == "single");
    CHECK(m.reward_mbps.size() == 20);
    CHECK(m.user_mbps.size() == 20);
    CHECK(m.convergence_epoch == 0);
    CHECK(m.config_changes == 1);  // the one-shot assignment
    CHECK(m.steady_state_mbps == doctest::Approx(m.reward_mbps.back()));
}

TEST_CASE("agent run accounts every sensing epoch and logs actions") {
    auto m = run_single(testing::chain_spec(), "icalo", 42, 60);
    CHECK(m.reward_mbps.size() == 60);
    CHECK(m.action_applied.size() == 60);
    int applied = static_cast<int>(
        std::count(m.action_applied.begin(), m.action_applied.end(), true));
    // an action applied in the truncated tail keeps its count but not its flag
    CHECK(m.config_changes >= applied);
    CHECK(!m.actions.empty());
    CHECK(!m.kb.q.raw().empty());
    CHECK(m.steady_state_mbps > 0.0);
}

TEST_CASE("identical seeds give byte-identical csv output") {
    auto a = run_single(testing::chain_spec(), "icalo", 42, 40);
    auto b = run_single(testing::chain_spec(), "icalo", 42, 40);
    std::ostringstream ca, cb;
    write_run_csv(a, 2000.0, ca);
    write_run_csv(b, 2000.0, cb);
    CHECK(ca.str() == cb.str());
    CHECK(ca.str().rfind("# ", 0) == 0);
    CHECK(ca.str().find("epoch_ms=") != std::string::npos);
}

TEST_CASE("run csv has one row per epoch with fixed precision") {
    auto m = run_single(testing::chain_spec(), "cca", 7, 12);
    std::ostringstream os;
    write_run_csv(m, 2000.0, os);
    std::istringstream is(os.str());
    std::string line;
    int rows = 0, comments = 0;
    while (std::getline(is, line)) {
        if (line.rfind("#", 0) == 0) { ++comments; continue; }
        ++rows;
    }
    CHECK(comments >= 1);
    CHECK(rows == 12 + 1);  // header + epochs
    CHECK(format_csv_double(1.0 / 3.0) == "0.333333");
    CHECK(format_csv_double(40.0) == "40.000000");
}

TEST_CASE("experiment summary orders seeds and carries the deciles") {
    ScenarioSpec spec = testing::chain_spec();
    auto r = run_experiment(spec, "cca", {9, 2, 5}, 10);
    REQUIRE(r.runs.size() == 3);
    CHECK(r.runs[0].seed == 2);
    CHECK(r.runs[1].seed == 5);
    CHECK(r.runs[2].seed == 9);
    REQUIRE(r.cdf_deciles.size() == 11);
    CHECK(std::is_sorted(r.cdf_deciles.begin(), r.cdf_deciles.end()));

    SUBCASE("seed order does not change the result") {
        auto r2 = run_experiment(spec, "cca", {5, 9, 2}, 10);
        CHECK(r.cdf_deciles == r2.cdf_deciles);
        for (size_t i = 0; i < r.runs.size(); ++i)
            CHECK(r.runs[i].steady_state_mbps ==
                  doctest::Approx(r2.runs[i].steady_state_mbps));
    }
}

TEST_CASE("experiment output directory holds the expected files") {
    std::string dir = "/tmp/icalo_harness_test_out";
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    run_experiment(testing::chain_spec(), "icalo", {1, 2}, 16, dir);
    CHECK(std::filesystem::exists(dir + "/icalo_seed1.csv"));
    CHECK(std::filesystem::exists(dir + "/icalo_seed2.csv"));
    CHECK(std::filesystem::exists(dir + "/icalo_seed1_kb.txt"));
    CHECK(std::filesystem::exists(dir + "/icalo_seed1_actions.csv"));
    CHECK(std::filesystem::exists(dir + "/icalo_summary.csv"));
    // the KB dump restores to an equal knowledge base
    KnowledgeBase back = restore_file(dir + "/icalo_seed1_kb.txt");
    auto again = run_single(testing::chain_spec(), "icalo", 1, 16);
    CHECK(kb_equal(back, again.kb));
}

TEST_CASE("budget refusal is recorded, not fatal") {
    ScenarioSpec spec = testing::chain_spec();
    spec.n_channels = 101;  // 101^3 channel tuples exceed the budget
    auto m = run_single(spec, "brute", 0, 4);
    CHECK(m.budget_refused);
    CHECK(!m.note.empty());
}

TEST_CASE("resilience phases split at external events") {
    ScenarioSpec spec = testing::chain_spec();
    auto m = run_single(spec, "icalo", 11, 40);

    SUBCASE("no events yields a single phase") {
        auto ph = resilience_phases(m, spec);
        REQUIRE(ph.size() == 1);
        CHECK(ph[0].start_epoch == 0);
        CHECK(ph[0].end_epoch == 40);
    }

    SUBCASE("one mid-run event yields two phases") {
        ScenarioSpec ev = spec;
        TimedEvent cut;
        cut.epoch = 20;
        cut.kind = EventKind::DeactivateExternal;
        cut.ap_id = "cafe";
        ev.events.push_back(cut);
        auto run2 = run_single(ev, "icalo", 11, 40);
        auto ph = resilience_phases(run2, ev);
        REQUIRE(ph.size() == 2);
        CHECK(ph[0].end_epoch == 20);
        CHECK(ph[1].start_epoch == 20);
        CHECK(ph[1].end_epoch == 40);
        for (const auto& p : ph)
            if (p.censored) CHECK(p.convergence_epochs == -1);
    }
}

TEST_CASE("svg plot is well formed") {
    std::ostringstream os;
    write_series_svg({{1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}}, {"a", "b"}, os);
    std::string s = os.str();
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("polyline") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
}
