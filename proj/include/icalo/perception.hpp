#pragma once

#include <stdexcept>
#include <vector>

#include "icalo/core.hpp"
#include "icalo/environment.hpp"

namespace icalo {

struct CounterResetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RadioPerception {
    int channel = 1;
    double utilization = 0.0;     // u_d in [0,100], or the 1000 sentinel
    double activity = 0.0;        // rho_d in [0,100]
};

struct UserPerception {
    double retries_rate = 0.0;
    double error_rate = 0.0;
    bool no_traffic = false;  // zero packet delta; rates reported as 0
};

struct PerceptionSnapshot {
    std::vector<std::vector<RadioPerception>> radios;  // [node][radio]
    std::vector<UserPerception> users;                 // [user ordinal]
    std::vector<double> backhaul_rssi;                 // [node], NAN for mAP/users
};

struct TriggerThresholds {
    double u_thr = 60.0;
    double retr_thr = 50.0;
    double err_thr = 0.005;
    double rssi_min = -60.0;
    double rho_ratio = 0.1;  // concrete reading of "rho/u << 1"
};

enum class TriggerState { Quiet, Suboptimal };

double utilization_from_counters(double cb_t_ms, double cb_t_tau_ms, double tau_ms);
double activity_from_counters(double chrx_t_ms, double chtx_t_ms, double chrx_t_tau_ms,
                              double chtx_t_tau_ms, double tau_ms);

struct RateResult {
    double percent = 0.0;
    bool no_traffic = false;
};
RateResult retries_rate(double retr_delta, double pack_delta);
RateResult error_rate(double err_delta, double pack_delta);

// Indicators from two counter snapshots of one world, `window_ms` apart.
// A window of 0 means one sensing period (tau).
PerceptionSnapshot make_snapshot(const World& w, const CounterBank& prev,
                                 const CounterBank& cur, double window_ms = 0.0);

// Parent-node false-alarm correction: a child radio with rho << u on a
// shared link channel inherits the serving parent radio's activity.
void correct_activity(PerceptionSnapshot& s, const NetworkGraph& g,
                      double rho_ratio = 0.1);

TriggerState trigger(const PerceptionSnapshot& s, const TriggerThresholds& thr);

}  // namespace icalo
