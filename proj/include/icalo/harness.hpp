#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "icalo/baselines.hpp"
#include "icalo/scenario.hpp"

namespace icalo {

// One seeded run of one scheme. Epoch indices count sensing epochs of
// tau_ms each; agent decisions fall every samples_per_decision epochs.
struct RunMetrics {
    std::string scheme;
    uint64_t seed = 0;
    std::vector<double> reward_mbps;            // per epoch
    std::vector<std::vector<double>> user_mbps; // [epoch][user ordinal]
    std::vector<bool> action_applied;           // per epoch
    long convergence_epoch = -1;                // -1 = not converged
    double steady_state_mbps = 0.0;             // mean of the trailing window
    int config_changes = 0;
    bool budget_refused = false;                // brute force over budget
    std::string note;
    KnowledgeBase kb;                           // agent schemes only
    std::vector<LogEntry> actions;              // agent schemes only
};

// First epoch e whose objective stays within +-tol (relative) for `window`
// consecutive epochs with no applied action inside the window; -1 when no
// such epoch exists. A series shorter than the window shrinks the window.
long detect_convergence(const std::vector<double>& series,
                        const std::vector<bool>& action_applied,
                        int window = 10, double tol = 0.05);

// scheme is one of: icalo, ugrl, single, cca, clica, brute.
// epochs = 0 falls back to spec.epochs. Throws std::invalid_argument on an
// unknown scheme.
RunMetrics run_single(const ScenarioSpec& spec, const std::string& scheme,
                      uint64_t seed, long epochs = 0);

struct ExperimentResult {
    std::vector<RunMetrics> runs;
    std::vector<double> cdf_deciles;  // steady-state objective, 0..100% in 10% steps
};

// Seeded batch; when out_dir is nonempty, writes per-run CSVs, a summary
// CSV with the CDF deciles, KB dumps for agent schemes, and optional SVGs.
ExperimentResult run_experiment(const ScenarioSpec& spec, const std::string& scheme,
                                const std::vector<uint64_t>& seeds, long epochs = 0,
                                const std::string& out_dir = "", bool svg = false);

struct PhaseResult {
    long start_epoch = 0;
    long end_epoch = 0;             // exclusive
    long convergence_epochs = -1;   // relative to start
    bool censored = false;          // no convergence inside the phase
};

// Splits one run at the timeline's external-AP event epochs and detects
// convergence per phase.
std::vector<PhaseResult> resilience_phases(const RunMetrics& run, const ScenarioSpec& spec);

struct ResilienceResult {
    std::vector<RunMetrics> runs;
    std::vector<std::vector<PhaseResult>> phases;  // [seed index][phase]
};

ResilienceResult resilience_experiment(const ScenarioSpec& spec,
                                       const std::vector<uint64_t>& seeds, long epochs = 0,
                                       const std::string& out_dir = "", bool svg = false);

std::string format_csv_double(double v);
void write_run_csv(const RunMetrics& m, double tau_ms, std::ostream& os);
void write_summary_csv(const ExperimentResult& r, double tau_ms, std::ostream& os);
void write_series_svg(const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& labels, std::ostream& os);

std::vector<double> cdf_deciles(std::vector<double> values);

}  // namespace icalo
