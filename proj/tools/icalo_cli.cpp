#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icalo/harness.hpp"

namespace {

std::vector<uint64_t> parse_seeds(const std::string& spec) {
    std::vector<uint64_t> seeds;
    auto dots = spec.find("..");
    if (dots == std::string::npos) {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) seeds.push_back(std::stoull(tok));
    } else {
        uint64_t a = std::stoull(spec.substr(0, dots));
        uint64_t b = std::stoull(spec.substr(dots + 2));
        if (b < a) throw CLI::ValidationError("--seeds", "range end precedes start");
        for (uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw CLI::ValidationError("--seeds", "empty seed list");
    return seeds;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

void print_batch(const icalo::ExperimentResult& r) {
    for (const auto& m : r.runs) {
        std::cout << m.scheme << " seed=" << m.seed
                  << " steady=" << icalo::format_csv_double(m.steady_state_mbps)
                  << " Mbps conv_epoch=" << m.convergence_epoch
                  << " changes=" << m.config_changes;
        if (m.budget_refused) std::cout << " (budget refused)";
        std::cout << "\n";
    }
    if (!r.cdf_deciles.empty()) {
        std::cout << "cdf deciles (Mbps):";
        for (double v : r.cdf_deciles) std::cout << " " << icalo::format_csv_double(v);
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mesh channel/placement optimizer testbench"};
    app.require_subcommand(1);

    std::string scenario_path, scheme = "icalo", seeds_spec = "1..1", out_dir;
    long epochs = 0;
    bool svg = false;
    std::string channels_spec, locations_spec;

    auto add_common = [&](CLI::App* sub, bool with_scheme) {
        sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        sub->add_option("--seeds", seeds_spec, "seed range a..b or comma list");
        sub->add_option("--epochs", epochs, "override the scenario's epoch count");
        sub->add_option("--out", out_dir, "output directory for CSV/KB/SVG files");
        sub->add_flag("--svg", svg, "also emit SVG plots");
        if (with_scheme)
            sub->add_option("--scheme", scheme,
                            "icalo | ugrl | single | cca | clica | brute");
    };

    auto* run = app.add_subcommand("run", "run one scheme over a seed batch");
    add_common(run, true);

    auto* compare = app.add_subcommand("compare", "run icalo, clica, cca and single");
    add_common(compare, false);

    auto* resilience = app.add_subcommand("resilience", "per-phase convergence analysis");
    add_common(resilience, false);

    auto* oracle = app.add_subcommand("oracle", "exhaustive search for the optimum");
    oracle->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    oracle->add_option("--channels", channels_spec, "comma list (default 1..channels)");
    oracle->add_option("--locations", locations_spec,
                       "comma list of grid indices (default: current extender spots)");

    CLI11_PARSE(app, argc, argv);

    try {
        icalo::ScenarioSpec spec = icalo::load_scenario(scenario_path);
        if (run->parsed()) {
            auto r = icalo::run_experiment(spec, scheme, parse_seeds(seeds_spec), epochs,
                                           out_dir, svg);
            print_batch(r);
        } else if (compare->parsed()) {
            auto seeds = parse_seeds(seeds_spec);
            for (const std::string& sc : {"icalo", "clica", "cca", "single"}) {
                auto r = icalo::run_experiment(spec, sc, seeds, epochs, out_dir, svg);
                print_batch(r);
            }
        } else if (resilience->parsed()) {
            auto r = icalo::resilience_experiment(spec, parse_seeds(seeds_spec), epochs,
                                                  out_dir, svg);
            for (size_t i = 0; i < r.runs.size(); ++i) {
                std::cout << "seed=" << r.runs[i].seed << " phases:";
                for (const auto& ph : r.phases[i]) {
                    std::cout << " [" << ph.start_epoch << "," << ph.end_epoch << ")=";
                    if (ph.censored) std::cout << "censored";
                    else std::cout << ph.convergence_epochs;
                }
                std::cout << "\n";
            }
        } else if (oracle->parsed()) {
            icalo::World w = icalo::build_world(spec);
            std::vector<int> channels;
            if (channels_spec.empty()) {
                channels.resize(w.graph.n_channels);
                std::iota(channels.begin(), channels.end(), 1);
            } else {
                channels = parse_int_list(channels_spec);
            }
            std::vector<int> locations;
            if (locations_spec.empty()) {
                std::set<int> locs;
                for (const auto& n : w.graph.nodes)
                    if (n.role == icalo::NodeRole::Extender) locs.insert(n.loc.grid_index);
                locations.assign(locs.begin(), locs.end());
            } else {
                locations = parse_int_list(locations_spec);
            }
            auto res = icalo::brute_force_optimum(w, locations, channels);
            std::cout << "evaluations=" << res.evaluations << "\n";
            if (!res.found) {
                std::cout << "no feasible configuration\n";
                return 1;
            }
            std::cout << "best objective=" << icalo::format_csv_double(res.best_objective_mbps)
                      << " Mbps\n";
            for (size_t v = 0; v < res.best_config.radio_channels.size(); ++v) {
                std::cout << "node " << v << ": channels";
                for (int c : res.best_config.radio_channels[v]) std::cout << " " << c;
                std::cout << " grid=" << res.best_config.node_locations[v].grid_index << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
