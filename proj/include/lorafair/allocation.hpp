#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lorafair/phy.hpp"

namespace lorafair {

// One deployable radio combination.
struct RateCombo {
    int sf = 7;
    int bw_hz = 125000;
    int cr_n = 1;

    bool operator==(const RateCombo&) const = default;
};

// Total order used when handing out combinations: fastest first.
inline bool faster_than(const RateCombo& a, const RateCombo& b) {
    double ra = bit_rate(a.sf, a.bw_hz, a.cr_n);
    double rb = bit_rate(b.sf, b.bw_hz, b.cr_n);
    if (ra != rb) return ra > rb;
    if (a.sf != b.sf) return a.sf < b.sf;
    if (a.bw_hz != b.bw_hz) return a.bw_hz > b.bw_hz;
    return a.cr_n < b.cr_n;
}

inline std::vector<RateCombo> default_deployment() {
    std::vector<RateCombo> out;
    for (int sf = kMinSf; sf <= kMaxSf; ++sf) out.push_back({sf, 125000, 1});
    return out;
}

struct RatioEntry {
    RateCombo combo;
    double ratio = 0.0;
};

// Node-share ratios per combination, ordered fastest first, summing to 1.
using RateRatios = std::vector<RatioEntry>;

// Share of nodes per SF that equalizes per-SF channel occupancy:
// p_sf = (sf / 2^sf) / sum_i (i / 2^i), i = 7..12. Index 0 = SF7.
inline std::array<double, kSfCount> fair_sf_ratios() {
    std::array<double, kSfCount> w{};
    double total = 0.0;
    for (int sf = kMinSf; sf <= kMaxSf; ++sf) {
        w[static_cast<std::size_t>(sf - kMinSf)] =
            sf / static_cast<double>(std::int64_t{1} << sf);
        total += w[static_cast<std::size_t>(sf - kMinSf)];
    }
    for (double& v : w) v /= total;
    return w;
}

// How bandwidth splits a spreading factor's share. The linear mode is the
// plain formula (weights proportional to bw); the quadratic mode reproduces
// the published two-bandwidth split (1:4 for 125k/250k).
enum class BwWeighting { linear, quadratic };

namespace detail {

inline void validate_deployment(const std::vector<RateCombo>& deployed) {
    if (deployed.empty()) throw std::invalid_argument("deployment: empty combination set");
    for (const auto& c : deployed) {
        if (!valid_sf(c.sf) || !valid_bw(c.bw_hz) || !valid_cr_n(c.cr_n))
            throw std::invalid_argument("deployment: invalid combination");
        if (std::count(deployed.begin(), deployed.end(), c) != 1)
            throw std::invalid_argument("deployment: duplicate combination");
    }
}

}  // namespace detail

// Extends the fair SF shares across the deployed (sf, bw, cr) set: each SF's
// share is split over its deployed bandwidths (normalized per SF so the SF
// marginal is preserved) and then over coding rates proportionally to the
// coding-rate fraction.
inline RateRatios fair_rate_ratios(const std::vector<RateCombo>& deployed,
                                   BwWeighting weighting = BwWeighting::linear) {
    detail::validate_deployment(deployed);
    auto sf_share = fair_sf_ratios();

    // Per-SF share renormalized over the SFs actually deployed.
    std::array<bool, kSfCount> sf_present{};
    for (const auto& c : deployed) sf_present[static_cast<std::size_t>(c.sf - kMinSf)] = true;
    double present_total = 0.0;
    for (int i = 0; i < kSfCount; ++i)
        if (sf_present[static_cast<std::size_t>(i)]) present_total += sf_share[static_cast<std::size_t>(i)];

    auto bw_weight = [weighting](int bw_hz) {
        double w = bw_hz / 1000.0;
        return weighting == BwWeighting::linear ? w : w * w;
    };

    RateRatios out;
    for (const auto& c : deployed) {
        double p_sf = sf_share[static_cast<std::size_t>(c.sf - kMinSf)] / present_total;

        double bw_total = 0.0;
        std::vector<int> sf_bws;
        for (const auto& d : deployed)
            if (d.sf == c.sf && std::find(sf_bws.begin(), sf_bws.end(), d.bw_hz) == sf_bws.end())
                sf_bws.push_back(d.bw_hz);
        for (int bw : sf_bws) bw_total += bw_weight(bw);
        double p_bw = bw_weight(c.bw_hz) / bw_total;

        double cr_total = 0.0;
        for (const auto& d : deployed)
            if (d.sf == c.sf && d.bw_hz == c.bw_hz) cr_total += 4.0 / (4.0 + d.cr_n);
        double p_cr = (4.0 / (4.0 + c.cr_n)) / cr_total;

        out.push_back({c, p_sf * p_bw * p_cr});
    }
    std::sort(out.begin(), out.end(),
              [](const RatioEntry& a, const RatioEntry& b) { return faster_than(a.combo, b.combo); });
    return out;
}

inline RateRatios fair_sf_bw_ratios(const std::vector<RateCombo>& deployed,
                                    BwWeighting weighting = BwWeighting::linear) {
    return fair_rate_ratios(deployed, weighting);
}

struct ComboCount {
    RateCombo combo;
    int count = 0;
};

// Integer node counts from fractional shares via largest-remainder rounding;
// remainder ties go to the slower combination so scarce slow classes are never
// starved.
inline std::vector<ComboCount> ratios_to_counts(int n, const RateRatios& ratios) {
    if (n < 0) throw std::invalid_argument("ratios_to_counts: negative n");
    if (ratios.empty()) throw std::invalid_argument("ratios_to_counts: empty ratios");
    double sum = 0.0;
    for (const auto& r : ratios) {
        if (r.ratio < 0) throw std::invalid_argument("ratios_to_counts: negative ratio");
        sum += r.ratio;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("ratios_to_counts: ratios must sum to 1");

    std::vector<ComboCount> out;
    std::vector<double> remainder;
    int assigned = 0;
    for (const auto& r : ratios) {
        double exact = n * r.ratio;
        int base = static_cast<int>(std::floor(exact));
        out.push_back({r.combo, base});
        remainder.push_back(exact - base);
        assigned += base;
    }
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        return faster_than(out[b].combo, out[a].combo);  // tie: slower first
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) out[order[i % order.size()]].count += 1;
    return out;
}

// What the network server knows about a node before allocating: its id and
// the averaged path gain (measured RSSI minus the common reference TP, so
// "gain + tp" is the received power at the gateway).
struct NodeReport {
    int node_id = 0;
    double path_gain_db = 0.0;
    int sample_count = 20;
};

// Radio parameters per node, aligned with the report vector passed in.
using Assignment = std::vector<TxParams>;

namespace detail {

// Indices of reports sorted strongest path gain first (ties by id).
inline std::vector<std::size_t> sort_by_gain_desc(const std::vector<NodeReport>& reports) {
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (reports[a].path_gain_db != reports[b].path_gain_db)
            return reports[a].path_gain_db > reports[b].path_gain_db;
        return reports[a].node_id < reports[b].node_id;
    });
    return order;
}

// Spreads each combination's count evenly across m slots (apportionment
// sequencing); slot r gets the combo with the largest outstanding quota.
inline std::vector<RateCombo> interleave(const std::vector<ComboCount>& counts, int m) {
    std::vector<int> placed(counts.size(), 0);
    std::vector<RateCombo> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
        std::size_t best = counts.size();
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (placed[c] >= counts[c].count) continue;
            double score = static_cast<double>(counts[c].count) * (r + 1) -
                           static_cast<double>(m) * placed[c];
            if (score > best_score + 1e-12) {
                best_score = score;
                best = c;
            }
        }
        if (best == counts.size()) throw std::logic_error("interleave: counts exhausted early");
        out.push_back(counts[best].combo);
        placed[best] += 1;
    }
    return out;
}

}  // namespace detail

// Fair data-rate assignment. Nodes are sorted by path gain and divided into
// contiguous regions of region_size (0 = one region spanning the whole cell;
// the last region absorbs any remainder); each region's nodes are split
// according to the fair ratios. A whole-cell region hands combinations out in
// order (fastest to the strongest nodes); smaller regions interleave them so
// every data rate appears throughout the region.
inline std::vector<RateCombo> assign_rates_by_region(const std::vector<NodeReport>& reports,
                                                     const std::vector<RateCombo>& deployed,
                                                     int region_size = 0,
                                                     BwWeighting weighting = BwWeighting::linear) {
    if (reports.empty()) throw std::invalid_argument("assign_rates_by_region: no nodes");
    if (region_size != 0 && region_size < 50)
        throw std::invalid_argument("assign_rates_by_region: region_size must be >= 50 (or 0 for one region)");
    const int n = static_cast<int>(reports.size());
    RateRatios ratios = fair_rate_ratios(deployed, weighting);
    auto order = detail::sort_by_gain_desc(reports);

    bool whole_cell = region_size == 0 || region_size >= n;
    int regions = whole_cell ? 1 : n / region_size;
    std::vector<RateCombo> out(reports.size());
    int start = 0;
    for (int reg = 0; reg < regions; ++reg) {
        int size = reg + 1 == regions ? n - start : region_size;
        auto counts = ratios_to_counts(size, ratios);
        std::vector<RateCombo> slots;
        if (whole_cell) {
            slots.reserve(static_cast<std::size_t>(size));
            for (const auto& cc : counts)
                for (int i = 0; i < cc.count; ++i) slots.push_back(cc.combo);
        } else {
            slots = detail::interleave(counts, size);
        }
        for (int i = 0; i < size; ++i) out[order[static_cast<std::size_t>(start + i)]] = slots[static_cast<std::size_t>(i)];
        start += size;
    }
    return out;
}

// Result of the received-power balancing TP control. tp_dbm is aligned with
// the input reports; visits counts node inspections across all stages (the
// algorithm is linear in the node count once sorted).
struct PowerAssignment {
    std::vector<int> tp_dbm;
    int min_power = 0;
    int max_power = 0;
    long visits = 0;
};

// Balances received powers within the smallest co-channel rejection margin
// using discrete TP levels. Strongest nodes drop to the minimum level while
// their received power stays above the adjusted weakest power; weakest nodes
// rise to a chosen MaxPower while they stay within the margin of it; nodes in
// between sweep through the intermediate levels, advancing a level whenever
// the margin against the MaxPower group's strongest member would break.
// All comparisons are in signed dB on path gains referenced to 0 dBm.
inline PowerAssignment fadr_power_control(const std::vector<NodeReport>& reports,
                                          const std::vector<int>& pow_levels,
                                          const CirMatrix& cir) {
    if (reports.empty()) throw std::invalid_argument("fadr_power_control: no nodes");
    if (pow_levels.empty()) throw std::invalid_argument("fadr_power_control: no power levels");
    for (std::size_t i = 1; i < pow_levels.size(); ++i)
        if (pow_levels[i] <= pow_levels[i - 1])
            throw std::invalid_argument("fadr_power_control: pow_levels must be strictly ascending");

    const std::size_t n = reports.size();
    auto order = detail::sort_by_gain_desc(reports);
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = reports[order[k]].path_gain_db;

    PowerAssignment res;
    res.min_power = pow_levels.front();
    res.max_power = pow_levels.back();
    const double min_cir = cir.min();
    const int unset = std::numeric_limits<int>::min();
    std::vector<int> tp(n, unset);

    // MaxPower: the smallest level that closes the original extreme spread to
    // within the margin; the top level if none does.
    const double strongest_floor = g.front() + res.min_power;
    for (std::size_t i = 1; i < pow_levels.size(); ++i) {
        if (std::fabs(strongest_floor - (g.back() + pow_levels[i])) <= min_cir) {
            res.max_power = pow_levels[i];
            break;
        }
    }

    // Weakest received power once the extremes are assigned (snapshot of the
    // original extremes, not iteratively updated).
    const double new_min = std::min(g.back() + res.max_power, strongest_floor);

    // Stage 1: strongest nodes take the minimum level while they stay at or
    // above the adjusted weakest power.
    std::size_t k = 0;
    while (k < n) {
        ++res.visits;
        if (g[k] + res.min_power >= new_min) {
            tp[k] = res.min_power;
            ++k;
        } else {
            break;
        }
    }
    const std::size_t first_unassigned = k;

    // Stage 2: weakest nodes take MaxPower while they stay within the margin
    // of the adjusted weakest power.
    std::size_t back = n;
    while (back > first_unassigned) {
        ++res.visits;
        if (std::fabs(g[back - 1] + res.max_power - new_min) <= min_cir) {
            tp[back - 1] = res.max_power;
            --back;
        } else {
            break;
        }
    }
    const std::size_t max_pow_index = back;  // lowest index holding MaxPower; n if none

    // Stage 3: the nodes strictly between the two frontiers take the
    // intermediate levels in ascending order. A level is handed out while the
    // node stays within the margin of the MaxPower group's strongest member;
    // the next level resumes at the first node that violated it.
    if (max_pow_index < n && first_unassigned < max_pow_index) {
        const double ref = g[max_pow_index] + res.max_power;
        std::size_t cur = first_unassigned;
        for (int lvl : pow_levels) {
            if (lvl <= res.min_power || lvl >= res.max_power) continue;
            if (cur >= max_pow_index) break;
            ++res.visits;
            if (std::fabs(g[cur] + lvl - new_min) > min_cir ||
                std::fabs(g[cur] + lvl - ref) > min_cir)
                continue;
            std::size_t j = cur;
            while (j < max_pow_index) {
                ++res.visits;
                if (std::fabs(g[j] + lvl - ref) > min_cir) {
                    cur = j;
                    break;
                }
                tp[j] = lvl;
                ++j;
            }
            if (j >= max_pow_index) cur = j;
        }
    }

    // Anything left between the frontiers could not be balanced within the
    // margin; give it MaxPower.
    for (std::size_t i = 0; i < n; ++i) {
        if (tp[i] == unset) {
            tp[i] = res.max_power;
            ++res.visits;
        }
    }

    res.tp_dbm.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) res.tp_dbm[order[i]] = tp[i];
    return res;
}

}  // namespace lorafair
