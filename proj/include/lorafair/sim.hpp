#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorafair/baselines.hpp"
#include "lorafair/channel.hpp"
#include "lorafair/phy.hpp"
#include "lorafair/random.hpp"

namespace lorafair {

enum class Outcome {
    delivered,
    lost_same_sf,
    lost_cross_sf,
    lost_demod_limit,
    lost_sensitivity,
};

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::delivered: return "delivered";
        case Outcome::lost_same_sf: return "lost_same_sf";
        case Outcome::lost_cross_sf: return "lost_cross_sf";
        case Outcome::lost_demod_limit: return "lost_demod_limit";
        case Outcome::lost_sensitivity: return "lost_sensitivity";
    }
    return "unknown";
}

struct Transmission {
    int node_id = 0;
    double start_s = 0.0;
    double end_s = 0.0;
    TxParams params{};
    double rx_power_dbm = 0.0;
    Outcome outcome = Outcome::delivered;
};

struct Scenario {
    int n_nodes = 1000;
    double radius_m = 1000.0;
    PlacementMode placement = PlacementMode::area;
    NodeDistribution distribution{};
    int packet_len = 80;
    double mean_interval_s = 60.0;
    double sim_time_s = 7200.0;
    int max_recv = 8;
    std::vector<double> channels = {868e6};
    Strategy strategy{};
    bool capture_enabled = true;
    bool perfect_orthogonality = false;
    CirMatrix cir{};
    std::vector<int> pow_levels = {2, 5, 8, 11, 14};
    PropagationConfig propagation{};
    SensitivityModel sensitivity{};
    std::vector<RateCombo> deployed = default_deployment();
    BwWeighting bw_weighting = BwWeighting::linear;
    int rssi_samples = 20;
    AirtimeOptions airtime_opt{};

    void validate() const {
        if (n_nodes < 1) throw std::invalid_argument("scenario: n_nodes must be >= 1");
        if (radius_m <= kMinNodeDistanceM)
            throw std::invalid_argument("scenario: radius_m must exceed the minimum node distance");
        if (packet_len < 1 || packet_len > kMaxPayload)
            throw std::invalid_argument("scenario: packet_len out of range");
        if (mean_interval_s <= 0) throw std::invalid_argument("scenario: mean_interval_s must be > 0");
        if (sim_time_s <= 0) throw std::invalid_argument("scenario: sim_time_s must be > 0");
        if (max_recv < 1) throw std::invalid_argument("scenario: max_recv must be >= 1");
        if (channels.empty()) throw std::invalid_argument("scenario: no channels");
        for (double cf : channels)
            if (cf <= 0) throw std::invalid_argument("scenario: channel frequency must be > 0");
        detail::check_pow_levels(pow_levels);
        for (int lvl : pow_levels)
            if (lvl < EnergyProfile::kMinTp || lvl > EnergyProfile::kMaxTp)
                throw std::invalid_argument("scenario: power level outside supported TP range");
        if (rssi_samples < 1) throw std::invalid_argument("scenario: rssi_samples must be >= 1");
        propagation.validate();
        detail::validate_deployment(deployed);
        if (strategy.kind == Strategy::Kind::fadr_region && strategy.region_size < 50)
            throw std::invalid_argument("scenario: region size must be >= 50");
    }

    AllocationContext allocation_context() const {
        AllocationContext ctx;
        ctx.deployed = deployed;
        ctx.pow_levels = pow_levels;
        ctx.cir = cir;
        ctx.sensitivity = sensitivity;
        ctx.bw_weighting = bw_weighting;
        ctx.payload_len = packet_len;
        ctx.airtime_opt = airtime_opt;
        ctx.cf_hz = channels.front();
        return ctx;
    }
};

// Start times with exponentially distributed gaps of the given mean; a node
// never overlaps its own frames, so a start is pushed past the previous
// frame's end when the gap is shorter than the airtime. Only frames starting
// inside the horizon are generated; they run to completion.
inline std::vector<double> generate_traffic(double mean_interval_s, double airtime_s,
                                            double sim_time_s, Rng& rng) {
    if (mean_interval_s <= 0) throw std::invalid_argument("generate_traffic: mean interval must be > 0");
    if (airtime_s <= 0) throw std::invalid_argument("generate_traffic: airtime must be > 0");
    std::vector<double> starts;
    double t = rng.exponential(mean_interval_s);
    while (t < sim_time_s) {
        starts.push_back(t);
        t = std::max(t + rng.exponential(mean_interval_s), t + airtime_s);
    }
    return starts;
}

// Assigns every transmission exactly one outcome. Overlap is half-open
// [start, end); at equal times frame ends are processed before starts and
// ties within a kind break by node id. Below-sensitivity frames and frames
// dropped by the demodulator limit still radiate and take part in every power
// comparison; only decodable, admitted frames occupy one of the max_recv
// demodulators (held until frame end even once doomed). Precedence:
// lost_sensitivity, then lost_demod_limit, then collision loss attributed to
// the strongest interferer that defeated the frame (ties to the lower node
// id).
inline void resolve_receptions(std::vector<Transmission>& txs, const CirMatrix& cir,
                               bool capture_enabled, bool perfect_orthogonality, int max_recv,
                               const SensitivityModel& sensitivity) {
    if (max_recv < 1) throw std::invalid_argument("resolve_receptions: max_recv must be >= 1");
    const std::size_t n = txs.size();

    struct Event {
        double t;
        int kind;  // 0 = end, 1 = start
        int node;
        std::size_t idx;
    };
    std::vector<Event> events;
    events.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        events.push_back({txs[i].start_s, 1, txs[i].node_id, i});
        events.push_back({txs[i].end_s, 0, txs[i].node_id, i});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.node < b.node;
    });

    std::vector<char> below_sens(n, 0), demod_dropped(n, 0), admitted(n, 0);
    std::vector<double> killer_power(n, -std::numeric_limits<double>::infinity());
    std::vector<int> killer_node(n, -1);
    std::vector<char> killer_same_sf(n, 0);
    std::vector<std::size_t> active;
    int slots_used = 0;

    auto record_kill = [&](std::size_t victim, std::size_t by) {
        const double p = txs[by].rx_power_dbm;
        const int node = txs[by].node_id;
        if (p > killer_power[victim] ||
            (p == killer_power[victim] && node < killer_node[victim])) {
            killer_power[victim] = p;
            killer_node[victim] = node;
            killer_same_sf[victim] = txs[victim].params.sf == txs[by].params.sf;
        }
    };

    for (const Event& ev : events) {
        if (ev.kind == 0) {
            active.erase(std::find(active.begin(), active.end(), ev.idx));
            if (admitted[ev.idx]) --slots_used;
            continue;
        }
        const std::size_t i = ev.idx;
        const Transmission& ti = txs[i];
        if (ti.rx_power_dbm < sensitivity.at(ti.params.sf, ti.params.bw_hz)) {
            below_sens[i] = 1;
        } else if (slots_used >= max_recv) {
            demod_dropped[i] = 1;
        } else {
            admitted[i] = 1;
            ++slots_used;
        }
        for (std::size_t j : active) {
            const Transmission& tj = txs[j];
            if (ti.params.cf_hz != tj.params.cf_hz) continue;
            if (ti.params.sf == tj.params.sf) {
                if (!capture_enabled) {
                    record_kill(i, j);
                    record_kill(j, i);
                } else {
                    const double margin = cir.at(ti.params.sf, ti.params.sf);
                    if (ti.rx_power_dbm - tj.rx_power_dbm < margin) record_kill(i, j);
                    if (tj.rx_power_dbm - ti.rx_power_dbm < margin) record_kill(j, i);
                }
            } else if (!perfect_orthogonality) {
                if (tj.rx_power_dbm - ti.rx_power_dbm > cir.at(ti.params.sf, tj.params.sf))
                    record_kill(i, j);
                if (ti.rx_power_dbm - tj.rx_power_dbm > cir.at(tj.params.sf, ti.params.sf))
                    record_kill(j, i);
            }
        }
        active.push_back(i);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (below_sens[i])
            txs[i].outcome = Outcome::lost_sensitivity;
        else if (demod_dropped[i])
            txs[i].outcome = Outcome::lost_demod_limit;
        else if (killer_node[i] >= 0)
            txs[i].outcome = killer_same_sf[i] ? Outcome::lost_same_sf : Outcome::lost_cross_sf;
        else
            txs[i].outcome = Outcome::delivered;
    }
}

struct NodeState {
    Position pos{};
    double distance_m = 0.0;
    double path_gain_db = 0.0;
    TxParams params{};
};

struct NodeStats {
    long sent = 0;
    long delivered = 0;
    long lost_same_sf = 0;
    long lost_cross_sf = 0;
    long lost_demod_limit = 0;
    long lost_sensitivity = 0;
    double energy_j = 0.0;

    long lost_total() const {
        return lost_same_sf + lost_cross_sf + lost_demod_limit + lost_sensitivity;
    }
};

struct SimResult {
    double sim_time_s = 0.0;
    double radius_m = 0.0;
    std::vector<NodeState> nodes;
    std::vector<NodeStats> stats;
    std::vector<Transmission> transmissions;  // sorted by (start, node)
};

// Named RNG streams; every stochastic component draws from its own keyed
// stream so results do not depend on evaluation order or on other components'
// consumption.
namespace rng_stream {
inline constexpr std::uint64_t placement = 0;
inline constexpr std::uint64_t shadowing = 1;
inline constexpr std::uint64_t traffic = 2;
inline constexpr std::uint64_t channel = 3;
}  // namespace rng_stream

inline SimResult run(const Scenario& sc, std::uint64_t seed) {
    sc.validate();
    const std::size_t n = static_cast<std::size_t>(sc.n_nodes);

    Rng place_rng(seed, rng_stream::placement);
    auto positions = place_nodes(sc.n_nodes, sc.radius_m, sc.distribution, place_rng, sc.placement);

    SimResult res;
    res.sim_time_s = sc.sim_time_s;
    res.radius_m = sc.radius_m;
    res.nodes.resize(n);
    res.stats.resize(n);

    std::vector<NodeReport> reports(n);
    Rng shadow_rng(seed, rng_stream::shadowing);
    for (std::size_t i = 0; i < n; ++i) {
        res.nodes[i].pos = positions[i];
        res.nodes[i].distance_m = positions[i].distance();
        double shadow = sc.propagation.sigma_db > 0 ? shadow_rng.gaussian() * sc.propagation.sigma_db : 0.0;
        res.nodes[i].path_gain_db = -path_loss(sc.propagation, res.nodes[i].distance_m) - shadow;
        reports[i] = {static_cast<int>(i), res.nodes[i].path_gain_db, sc.rssi_samples};
    }

    Assignment assignment = apply_strategy(sc.strategy, reports, sc.allocation_context());
    EnergyProfile energy;

    for (std::size_t i = 0; i < n; ++i) {
        res.nodes[i].params = assignment[i];
        const TxParams& p = assignment[i];
        const double at = airtime(p, sc.packet_len, sc.airtime_opt);
        Rng traffic_rng(seed, rng_stream::traffic, i);
        Rng channel_rng(seed, rng_stream::channel, i);
        const double energy_per_packet = tx_energy(p, sc.packet_len, energy, sc.airtime_opt);
        for (double t : generate_traffic(sc.mean_interval_s, at, sc.sim_time_s, traffic_rng)) {
            Transmission tx;
            tx.node_id = static_cast<int>(i);
            tx.start_s = t;
            tx.end_s = t + at;
            tx.params = p;
            tx.params.cf_hz = sc.channels.size() == 1
                                  ? sc.channels.front()
                                  : sc.channels[channel_rng.below(sc.channels.size())];
            tx.rx_power_dbm = res.nodes[i].path_gain_db + p.tp_dbm;
            res.transmissions.push_back(tx);
            res.stats[i].sent += 1;
            res.stats[i].energy_j += energy_per_packet;
        }
    }

    std::sort(res.transmissions.begin(), res.transmissions.end(),
              [](const Transmission& a, const Transmission& b) {
                  if (a.start_s != b.start_s) return a.start_s < b.start_s;
                  return a.node_id < b.node_id;
              });

    resolve_receptions(res.transmissions, sc.cir, sc.capture_enabled, sc.perfect_orthogonality,
                       sc.max_recv, sc.sensitivity);

    for (const Transmission& tx : res.transmissions) {
        NodeStats& st = res.stats[static_cast<std::size_t>(tx.node_id)];
        switch (tx.outcome) {
            case Outcome::delivered: st.delivered += 1; break;
            case Outcome::lost_same_sf: st.lost_same_sf += 1; break;
            case Outcome::lost_cross_sf: st.lost_cross_sf += 1; break;
            case Outcome::lost_demod_limit: st.lost_demod_limit += 1; break;
            case Outcome::lost_sensitivity: st.lost_sensitivity += 1; break;
        }
    }
    return res;
}

}  // namespace lorafair
