#pragma once

#include <vector>

#include "icalo/core.hpp"

namespace icalo {

// Analytic PHY parameters. The defaults reproduce 802.11n-like single
// stream rates at 20 MHz: rate caps at 65 Mbps once the effective SNR
// (rssi + p_adjust_db against a -95 dBm noise floor) reaches ~15 dB.
struct PhyParams {
    double tx_power_dbm = 12.0;
    double p_adjust_db = 95.0;
    double max_bps = 5.0;  // bits/symbol/subcarrier: 5, 6 or 40/6
    double max_nss = 1.0;
    double n_ofdm = 52.0;
    double ppdu_s = 4e-6;
    double path_loss_exp = 3.0;
    double pl_ref_db = 40.0;  // loss at 1 m
    double cca_threshold_dbm = -82.0;
    double extra_loss_db_per_m = 0.0;  // crude wall model, off by default
};

constexpr double kRssiMin = -100.0;
constexpr double kRssiMax = 40.0;

// Log-distance path loss, clamped to [-100, 40] dBm. Coincident points use
// a 0.1 m distance floor.
double rssi_at(const Location& tx, const Location& rx, const PhyParams& p);

// Maximal link throughput in bits/second.
double link_rmax(double rssi_dbm, const PhyParams& p);

// Utilization-discounted throughput; utilization in percent of [0,100].
double link_throughput(double rmax_bps, double utilization_percent);

// Demand-capped bottleneck throughput along a path. link_rates and
// sharing_users are per path link; each link's rate is divided equally
// among the user paths traversing it.
double end_to_end_throughput(const Path& path, const std::vector<double>& link_rates_bps,
                             const std::vector<int>& sharing_users, double demand_bps);

}  // namespace icalo
