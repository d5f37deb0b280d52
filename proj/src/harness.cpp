#include "icalo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace icalo {

long detect_convergence(const std::vector<double>& series,
                        const std::vector<bool>& action_applied, int window, double tol) {
    if (series.empty()) throw std::invalid_argument("detect_convergence: empty series");
    const long n = static_cast<long>(series.size());
    const long w = std::min<long>(window, n);
    auto applied = [&](long i) {
        return i < static_cast<long>(action_applied.size()) && action_applied[i];
    };
    for (long t = 0; t + w <= n; ++t) {
        double ref = series[t];
        double band = tol * std::max(std::abs(ref), 1e-9);
        bool ok = true;
        for (long i = t; i < t + w && ok; ++i)
            ok = std::abs(series[i] - ref) <= band && !applied(i);
        if (ok) return t;
    }
    return -1;
}

namespace {

double trailing_mean(const std::vector<double>& s, int window = 10) {
    if (s.empty()) return 0.0;
    size_t n = std::min<size_t>(window, s.size());
    return std::accumulate(s.end() - n, s.end(), 0.0) / n;
}

// Steps the world for the run length recording metrics; the configuration
// is whatever the caller already applied.
void record_passive(World& w, long epochs, RunMetrics& m) {
    for (long e = 0; e < epochs; ++e) {
        w.step();
        auto ev = w.evaluate();
        m.reward_mbps.push_back(ev.reward_mbps);
        std::vector<double> um;
        for (double t : ev.user_throughput_bps) um.push_back(t / 1e6);
        m.user_mbps.push_back(std::move(um));
        m.action_applied.push_back(false);
    }
}

void finish(RunMetrics& m) {
    m.convergence_epoch = m.reward_mbps.empty()
                              ? -1
                              : detect_convergence(m.reward_mbps, m.action_applied);
    m.steady_state_mbps = trailing_mean(m.reward_mbps);
}

}  // namespace

RunMetrics run_single(const ScenarioSpec& spec, const std::string& scheme, uint64_t seed,
                      long epochs) {
    if (epochs <= 0) epochs = spec.epochs;
    RunMetrics m;
    m.scheme = scheme;
    m.seed = seed;
    World w = build_world(spec);

    if (scheme == "icalo" || scheme == "ugrl") {
        AgentParams p = resolve_agent_params(spec);
        p.guided = (scheme == "icalo");
        Agent agent(p, w, seed);
        while (static_cast<long>(agent.epoch_rewards().size()) < epochs)
            agent.decision_epoch(w);
        m.reward_mbps = agent.epoch_rewards();
        m.user_mbps = agent.epoch_user_mbps();
        const auto& flags = agent.epoch_action_applied();
        m.action_applied.assign(flags.begin(), flags.end());
        m.reward_mbps.resize(epochs);
        m.user_mbps.resize(epochs);
        m.action_applied.resize(epochs);
        m.config_changes = agent.applied_actions();
        m.kb = agent.kb();
        m.actions = agent.log();
    } else if (scheme == "single") {
        auto best = best_single_channel(w);
        apply_uniform_assignment(w, best.channel, best.channel);
        m.config_changes = 1;
        m.note = "channel=" + std::to_string(best.channel);
        record_passive(w, epochs, m);
    } else if (scheme == "cca") {
        std::mt19937_64 rng(seed);
        auto [fh, bh] = cca_assign(w, rng);
        m.config_changes = 1;
        m.note = "fronthaul=" + std::to_string(fh) + " backhaul=" + std::to_string(bh);
        record_passive(w, epochs, m);
    } else if (scheme == "clica") {
        clica_assign(w);
        m.config_changes = 1;
        record_passive(w, epochs, m);
    } else if (scheme == "brute") {
        std::set<int> locs;
        for (size_t v = 0; v < w.graph.nodes.size(); ++v)
            if (w.graph.nodes[v].role == NodeRole::Extender)
                locs.insert(w.graph.nodes[v].loc.grid_index);
        std::vector<int> channels(w.graph.n_channels);
        std::iota(channels.begin(), channels.end(), 1);
        try {
            auto res = brute_force_optimum(w, {locs.begin(), locs.end()}, channels);
            if (res.found) w.restore_config(res.best_config);
            m.config_changes = 1;
            m.note = "evaluations=" + std::to_string(res.evaluations);
            record_passive(w, epochs, m);
        } catch (const std::runtime_error& e) {
            m.budget_refused = true;
            m.note = e.what();
        }
    } else {
        throw std::invalid_argument("unknown scheme '" + scheme + "'");
    }
    if (!m.budget_refused) finish(m);
    return m;
}

std::vector<double> cdf_deciles(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    if (values.empty()) return out;
    for (int d = 0; d <= 10; ++d) {
        double pos = d / 10.0 * (values.size() - 1);
        size_t lo = static_cast<size_t>(std::floor(pos));
        size_t hi = static_cast<size_t>(std::ceil(pos));
        double frac = pos - lo;
        out.push_back(values[lo] * (1.0 - frac) + values[hi] * frac);
    }
    return out;
}

std::string format_csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_run_csv(const RunMetrics& m, double tau_ms, std::ostream& os) {
    os << "# scheme=" << m.scheme << " seed=" << m.seed << " epoch_ms="
       << format_csv_double(tau_ms) << "\n";
    size_t users = m.user_mbps.empty() ? 0 : m.user_mbps[0].size();
    os << "epoch,reward_mbps,action_applied";
    for (size_t k = 0; k < users; ++k) os << ",user" << k << "_mbps";
    os << "\n";
    for (size_t e = 0; e < m.reward_mbps.size(); ++e) {
        os << e << "," << format_csv_double(m.reward_mbps[e]) << ","
           << (e < m.action_applied.size() && m.action_applied[e] ? 1 : 0);
        for (size_t k = 0; k < users; ++k) os << "," << format_csv_double(m.user_mbps[e][k]);
        os << "\n";
    }
}

void write_summary_csv(const ExperimentResult& r, double tau_ms, std::ostream& os) {
    os << "# epoch_ms=" << format_csv_double(tau_ms) << "\n";
    os << "scheme,seed,convergence_epoch,steady_state_mbps,config_changes,note\n";
    for (const auto& m : r.runs)
        os << m.scheme << "," << m.seed << "," << m.convergence_epoch << ","
           << format_csv_double(m.steady_state_mbps) << "," << m.config_changes << ","
           << (m.budget_refused ? "budget-refused" : m.note) << "\n";
    for (size_t d = 0; d < r.cdf_deciles.size(); ++d)
        os << "cdf_decile," << d * 10 << ",," << format_csv_double(r.cdf_deciles[d]) << ",,\n";
}

void write_series_svg(const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& labels, std::ostream& os) {
    const double W = 640, H = 360, ml = 50, mb = 30;
    double ymax = 1e-9;
    size_t n = 1;
    for (const auto& s : series)
        for (double v : s) ymax = std::max(ymax, v);
    for (const auto& s : series) n = std::max(n, s.size());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (size_t i = 0; i < series.size(); ++i) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[i % 6] << "\" points=\"";
        for (size_t e = 0; e < series[i].size(); ++e) {
            double x = ml + (W - ml - 10) * (n > 1 ? double(e) / (n - 1) : 0.0);
            double y = H - mb - (H - mb - 10) * series[i][e] / ymax;
            os << format_csv_double(x) << "," << format_csv_double(y) << " ";
        }
        os << "\"/>\n";
        if (i < labels.size())
            os << "<text x=\"" << ml + 5 << "\" y=\"" << 20 + 15 * i << "\" fill=\""
               << colors[i % 6] << "\" font-size=\"12\">" << labels[i] << "</text>\n";
    }
    os << "<line x1=\"" << ml << "\" y1=\"10\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\""
       << W - 10 << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    os << "<text x=\"5\" y=\"15\" font-size=\"11\">" << format_csv_double(ymax)
       << " Mbps</text>\n</svg>\n";
}

namespace {

void emit_outputs(const ExperimentResult& r, const ScenarioSpec& spec,
                  const std::string& scheme, const std::string& out_dir, bool svg) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (const auto& m : r.runs) {
        std::ofstream os(fs::path(out_dir) / (scheme + "_seed" + std::to_string(m.seed) + ".csv"));
        write_run_csv(m, spec.tau_ms, os);
        if (scheme == "icalo" || scheme == "ugrl") {
            persist_file(m.kb,
                         (fs::path(out_dir) / (scheme + "_seed" + std::to_string(m.seed) + "_kb.txt"))
                             .string());
            std::ofstream al(fs::path(out_dir) /
                             (scheme + "_seed" + std::to_string(m.seed) + "_actions.csv"));
            al << "epoch,node,policy,action,verdict,reward_mbps,q,epsilon\n";
            for (const auto& le : m.actions)
                al << le.epoch << "," << le.node << "," << le.policy << "," << le.action << ","
                   << le.verdict << "," << format_csv_double(le.reward) << ","
                   << format_csv_double(le.q) << "," << format_csv_double(le.epsilon) << "\n";
        }
    }
    {
        std::ofstream os(fs::path(out_dir) / (scheme + "_summary.csv"));
        write_summary_csv(r, spec.tau_ms, os);
    }
    if (svg && !r.runs.empty()) {
        std::ofstream os(fs::path(out_dir) / (scheme + "_reward.svg"));
        std::vector<std::vector<double>> series;
        std::vector<std::string> labels;
        for (const auto& m : r.runs) {
            series.push_back(m.reward_mbps);
            labels.push_back("seed " + std::to_string(m.seed));
        }
        write_series_svg(series, labels, os);
    }
}

}  // namespace

ExperimentResult run_experiment(const ScenarioSpec& spec, const std::string& scheme,
                                const std::vector<uint64_t>& seeds, long epochs,
                                const std::string& out_dir, bool svg) {
    ExperimentResult r;
    for (uint64_t s : seeds) r.runs.push_back(run_single(spec, scheme, s, epochs));
    std::sort(r.runs.begin(), r.runs.end(),
              [](const RunMetrics& a, const RunMetrics& b) { return a.seed < b.seed; });
    std::vector<double> steady;
    for (const auto& m : r.runs)
        if (!m.budget_refused) steady.push_back(m.steady_state_mbps);
    r.cdf_deciles = cdf_deciles(std::move(steady));
    if (!out_dir.empty()) emit_outputs(r, spec, scheme, out_dir, svg);
    return r;
}

std::vector<PhaseResult> resilience_phases(const RunMetrics& run, const ScenarioSpec& spec) {
    std::set<long> cuts;
    for (const auto& e : spec.events)
        if (e.kind == EventKind::ActivateExternal || e.kind == EventKind::DeactivateExternal)
            if (e.epoch > 0) cuts.insert(e.epoch);
    std::vector<long> bounds{0};
    for (long c : cuts)
        if (c < static_cast<long>(run.reward_mbps.size())) bounds.push_back(c);
    bounds.push_back(static_cast<long>(run.reward_mbps.size()));

    std::vector<PhaseResult> phases;
    for (size_t i = 0; i + 1 < bounds.size(); ++i) {
        PhaseResult ph;
        ph.start_epoch = bounds[i];
        ph.end_epoch = bounds[i + 1];
        std::vector<double> s(run.reward_mbps.begin() + ph.start_epoch,
                              run.reward_mbps.begin() + ph.end_epoch);
        std::vector<bool> a;
        for (long e = ph.start_epoch; e < ph.end_epoch; ++e)
            a.push_back(e < static_cast<long>(run.action_applied.size()) && run.action_applied[e]);
        long conv = s.empty() ? -1 : detect_convergence(s, a);
        ph.convergence_epochs = conv;
        ph.censored = conv < 0;
        phases.push_back(ph);
    }
    return phases;
}

ResilienceResult resilience_experiment(const ScenarioSpec& spec,
                                       const std::vector<uint64_t>& seeds, long epochs,
                                       const std::string& out_dir, bool svg) {
    ResilienceResult r;
    for (uint64_t s : seeds) {
        RunMetrics m = run_single(spec, "icalo", s, epochs);
        r.phases.push_back(resilience_phases(m, spec));
        r.runs.push_back(std::move(m));
    }
    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        for (const auto& m : r.runs) {
            std::ofstream os(fs::path(out_dir) / ("resilience_seed" + std::to_string(m.seed) + ".csv"));
            write_run_csv(m, spec.tau_ms, os);
        }
        std::ofstream os(fs::path(out_dir) / "resilience_phases.csv");
        os << "# epoch_ms=" << format_csv_double(spec.tau_ms) << "\n";
        os << "seed,phase,start_epoch,end_epoch,convergence_epochs,censored\n";
        for (size_t i = 0; i < r.runs.size(); ++i)
            for (size_t p = 0; p < r.phases[i].size(); ++p)
                os << r.runs[i].seed << "," << p << "," << r.phases[i][p].start_epoch << ","
                   << r.phases[i][p].end_epoch << "," << r.phases[i][p].convergence_epochs << ","
                   << (r.phases[i][p].censored ? 1 : 0) << "\n";
        if (svg && !r.runs.empty()) {
            std::ofstream sv(fs::path(out_dir) / "resilience_reward.svg");
            std::vector<std::vector<double>> series;
            std::vector<std::string> labels;
            for (const auto& m : r.runs) {
                series.push_back(m.reward_mbps);
                labels.push_back("seed " + std::to_string(m.seed));
            }
            write_series_svg(series, labels, sv);
        }
    }
    return r;
}

}  // namespace icalo
