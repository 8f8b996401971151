#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lorafair/phy.hpp"
#include "lorafair/sim.hpp"

namespace lorafair {

// Data extraction rate: delivered / sent. A node that never sent is reported
// as 0 with the inactive flag set.
inline double der(long delivered, long sent, bool* inactive = nullptr) {
    if (sent < 0 || delivered < 0 || delivered > sent)
        throw std::logic_error("der: delivered/sent counters inconsistent");
    if (inactive) *inactive = sent == 0;
    return sent == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(sent);
}

// Jain's fairness index (Σx)² / (N·Σx²). The all-zero vector is defined as
// perfectly fair (index 1) with the flag set so callers can warn.
inline double jain_index(const std::vector<double>& values, bool* all_zero = nullptr) {
    if (values.empty()) throw std::invalid_argument("jain_index: empty input");
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
    }
    if (all_zero) *all_zero = sum_sq == 0.0;
    if (sum_sq == 0.0) return 1.0;
    return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

struct DistanceBin {
    double lo_m = 0.0;
    double hi_m = 0.0;
    int node_count = 0;
    double mean_der = 0.0;
};

// Mean per-node DER over half-open distance bins [k·w, (k+1)·w); empty bins
// are omitted.
inline std::vector<DistanceBin> bin_by_distance(const std::vector<double>& distance_m,
                                                const std::vector<double>& ders,
                                                double bin_width_m) {
    if (distance_m.size() != ders.size())
        throw std::invalid_argument("bin_by_distance: size mismatch");
    if (!(bin_width_m > 0)) throw std::invalid_argument("bin_by_distance: bin width must be > 0");
    std::vector<double> sums;
    std::vector<int> counts;
    for (std::size_t i = 0; i < distance_m.size(); ++i) {
        if (distance_m[i] < 0) throw std::invalid_argument("bin_by_distance: negative distance");
        auto k = static_cast<std::size_t>(std::floor(distance_m[i] / bin_width_m));
        if (k >= sums.size()) {
            sums.resize(k + 1, 0.0);
            counts.resize(k + 1, 0);
        }
        sums[k] += ders[i];
        counts[k] += 1;
    }
    std::vector<DistanceBin> out;
    for (std::size_t k = 0; k < sums.size(); ++k) {
        if (counts[k] == 0) continue;
        out.push_back({static_cast<double>(k) * bin_width_m, static_cast<double>(k + 1) * bin_width_m,
                       counts[k], sums[k] / counts[k]});
    }
    return out;
}

struct MetricsReport {
    long total_sent = 0;
    long total_delivered = 0;
    long lost_same_sf = 0;
    long lost_cross_sf = 0;
    long lost_demod_limit = 0;
    long lost_sensitivity = 0;

    double overall_der = 0.0;    // packet ratio: total delivered / total sent
    double node_mean_der = 0.0;  // unweighted mean of per-node DERs
    double jain = 1.0;
    bool jain_all_zero = false;
    double jain_excl_sf7 = 1.0;  // recomputed over nodes not on SF7
    bool jain_excl_sf7_defined = false;

    std::array<long, kSfCount> sf_sent{};
    std::array<long, kSfCount> sf_delivered{};
    std::array<double, kSfCount> sf_der{};  // packet ratio per SF; 0 when the SF is unused

    std::vector<double> node_der;
    std::vector<char> node_inactive;
    double total_energy_j = 0.0;
    std::vector<DistanceBin> distance_bins;  // width radius/20
};

inline MetricsReport compute_metrics(const SimResult& res) {
    MetricsReport rep;
    const std::size_t n = res.stats.size();
    if (n == 0) throw std::invalid_argument("compute_metrics: empty result");
    rep.node_der.resize(n);
    rep.node_inactive.resize(n);

    std::vector<double> distances(n);
    std::vector<double> excl_sf7;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeStats& st = res.stats[i];
        rep.total_sent += st.sent;
        rep.total_delivered += st.delivered;
        rep.lost_same_sf += st.lost_same_sf;
        rep.lost_cross_sf += st.lost_cross_sf;
        rep.lost_demod_limit += st.lost_demod_limit;
        rep.lost_sensitivity += st.lost_sensitivity;
        rep.total_energy_j += st.energy_j;

        bool inactive = false;
        rep.node_der[i] = der(st.delivered, st.sent, &inactive);
        rep.node_inactive[i] = inactive;
        rep.node_mean_der += rep.node_der[i];

        const int sf = res.nodes[i].params.sf;
        rep.sf_sent[static_cast<std::size_t>(sf - kMinSf)] += st.sent;
        rep.sf_delivered[static_cast<std::size_t>(sf - kMinSf)] += st.delivered;
        if (sf != kMinSf) excl_sf7.push_back(rep.node_der[i]);
        distances[i] = res.nodes[i].distance_m;
    }
    rep.node_mean_der /= static_cast<double>(n);
    rep.overall_der = der(rep.total_delivered, rep.total_sent);
    rep.jain = jain_index(rep.node_der, &rep.jain_all_zero);
    if (!excl_sf7.empty()) {
        rep.jain_excl_sf7 = jain_index(excl_sf7);
        rep.jain_excl_sf7_defined = true;
    }
    for (int s = 0; s < kSfCount; ++s)
        rep.sf_der[static_cast<std::size_t>(s)] =
            der(rep.sf_delivered[static_cast<std::size_t>(s)], rep.sf_sent[static_cast<std::size_t>(s)]);
    rep.distance_bins = bin_by_distance(distances, rep.node_der, res.radius_m / 20.0);
    return rep;
}

}  // namespace lorafair
