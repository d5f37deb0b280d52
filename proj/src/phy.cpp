#include "icalo/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icalo {

double rssi_at(const Location& tx, const Location& rx, const PhyParams& p) {
    double d = std::max(distance(tx, rx), 0.1);
    double loss = p.pl_ref_db + 10.0 * p.path_loss_exp * std::log10(d) +
                  p.extra_loss_db_per_m * d;
    return std::clamp(p.tx_power_dbm - loss, kRssiMin, kRssiMax);
}

double link_rmax(double rssi_dbm, const PhyParams& p) {
    double snr_db = rssi_dbm + p.p_adjust_db;
    double bps = std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
    bps = std::min(bps, p.max_bps);
    return bps * (p.max_nss / p.ppdu_s) * p.n_ofdm;
}

double link_throughput(double rmax_bps, double utilization_percent) {
    if (utilization_percent < 0.0 || utilization_percent > 100.0)
        throw std::domain_error("utilization outside [0,100]");
    return rmax_bps * (100.0 - utilization_percent) / 100.0;
}

double end_to_end_throughput(const Path& path, const std::vector<double>& link_rates_bps,
                             const std::vector<int>& sharing_users, double demand_bps) {
    if (path.links.empty()) throw std::runtime_error("end_to_end_throughput: empty path");
    if (link_rates_bps.size() != path.links.size() ||
        sharing_users.size() != path.links.size())
        throw std::invalid_argument("end_to_end_throughput: rate/share size mismatch");
    double r = demand_bps;
    for (size_t i = 0; i < link_rates_bps.size(); ++i) {
        int share = std::max(sharing_users[i], 1);
        r = std::min(r, link_rates_bps[i] / share);
    }
    return r;
}

}  // namespace icalo
