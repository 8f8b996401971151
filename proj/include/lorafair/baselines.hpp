#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorafair/allocation.hpp"
#include "lorafair/phy.hpp"

namespace lorafair {

// Shared knobs the allocation strategies draw from.
struct AllocationContext {
    std::vector<RateCombo> deployed = default_deployment();
    std::vector<int> pow_levels = {2, 5, 8, 11, 14};
    CirMatrix cir{};
    SensitivityModel sensitivity{};
    BwWeighting bw_weighting = BwWeighting::linear;
    int payload_len = 80;
    AirtimeOptions airtime_opt{};
    double cf_hz = 868e6;
};

namespace detail {

inline void check_pow_levels(const std::vector<int>& levels) {
    if (levels.empty()) throw std::invalid_argument("pow_levels: empty");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1])
            throw std::invalid_argument("pow_levels: must be strictly ascending");
}

inline TxParams make_params(const RateCombo& c, int tp, double cf_hz) {
    TxParams p;
    p.sf = c.sf;
    p.bw_hz = c.bw_hz;
    p.cr_n = c.cr_n;
    p.tp_dbm = tp;
    p.cf_hz = cf_hz;
    return p;
}

// Fastest deployed combination per spreading factor, ascending by SF.
inline std::vector<RateCombo> per_sf_combos(const std::vector<RateCombo>& deployed) {
    validate_deployment(deployed);
    std::vector<RateCombo> out;
    for (int sf = kMinSf; sf <= kMaxSf; ++sf) {
        const RateCombo* best = nullptr;
        for (const auto& c : deployed)
            if (c.sf == sf && (!best || faster_than(c, *best))) best = &c;
        if (best) out.push_back(*best);
    }
    return out;
}

}  // namespace detail

// Splits nodes evenly across the deployed spreading factors (remainder to the
// lower SFs), strongest path gains first, everyone at the top power level.
inline Assignment baseline_equal_sf(const std::vector<NodeReport>& reports,
                                    const AllocationContext& ctx) {
    if (reports.empty()) throw std::invalid_argument("baseline_equal_sf: no nodes");
    detail::check_pow_levels(ctx.pow_levels);
    auto combos = detail::per_sf_combos(ctx.deployed);
    const int n = static_cast<int>(reports.size());
    const int groups = static_cast<int>(combos.size());
    auto order = detail::sort_by_gain_desc(reports);

    Assignment out(reports.size());
    int start = 0;
    for (int gidx = 0; gidx < groups; ++gidx) {
        int size = n / groups + (gidx < n % groups ? 1 : 0);
        for (int i = 0; i < size; ++i)
            out[order[static_cast<std::size_t>(start + i)]] =
                detail::make_params(combos[static_cast<std::size_t>(gidx)], ctx.pow_levels.back(), ctx.cf_hz);
        start += size;
    }
    return out;
}

// Sends the 28% weakest nodes to the slowest deployed SF and splits the rest
// evenly across the remaining SFs (largest remainder, strongest first), all at
// the top power level.
inline Assignment baseline_adelantado(const std::vector<NodeReport>& reports,
                                      const AllocationContext& ctx) {
    if (reports.empty()) throw std::invalid_argument("baseline_adelantado: no nodes");
    detail::check_pow_levels(ctx.pow_levels);
    auto combos = detail::per_sf_combos(ctx.deployed);
    if (combos.size() < 2)
        throw std::invalid_argument("baseline_adelantado: needs at least two spreading factors");
    const int n = static_cast<int>(reports.size());
    const int n_slow = (28 * n) / 100;
    const int n_fast = n - n_slow;
    const int fast_groups = static_cast<int>(combos.size()) - 1;

    // Even split of the remaining nodes across the faster SFs via largest
    // remainder; ties go to the higher SF.
    std::vector<int> counts(static_cast<std::size_t>(fast_groups), n_fast / fast_groups);
    int deficit = n_fast % fast_groups;
    for (int i = fast_groups - 1; deficit > 0; --i, --deficit) counts[static_cast<std::size_t>(i)] += 1;

    auto order = detail::sort_by_gain_desc(reports);
    Assignment out(reports.size());
    int start = 0;
    for (int gidx = 0; gidx < fast_groups; ++gidx) {
        for (int i = 0; i < counts[static_cast<std::size_t>(gidx)]; ++i)
            out[order[static_cast<std::size_t>(start + i)]] =
                detail::make_params(combos[static_cast<std::size_t>(gidx)], ctx.pow_levels.back(), ctx.cf_hz);
        start += counts[static_cast<std::size_t>(gidx)];
    }
    for (int i = 0; i < n_slow; ++i)
        out[order[static_cast<std::size_t>(start + i)]] =
            detail::make_params(combos.back(), ctx.pow_levels.back(), ctx.cf_hz);
    return out;
}

// Fair data rates plus a reference-anchored power scheme: powers are raised so
// every node clears the weakest second-fastest-class node by the co-channel
// margin, except fastest-class nodes that would still corrupt that reference
// even at minimum power, which are pinned to minimum power instead.
inline Assignment baseline_reynders(const std::vector<NodeReport>& reports,
                                    const AllocationContext& ctx) {
    if (reports.empty()) throw std::invalid_argument("baseline_reynders: no nodes");
    detail::check_pow_levels(ctx.pow_levels);
    auto combos = assign_rates_by_region(reports, ctx.deployed, 0, ctx.bw_weighting);
    const double min_cir = ctx.cir.min();
    const int min_level = ctx.pow_levels.front();
    const int max_level = ctx.pow_levels.back();

    int min_sf = kMaxSf + 1;
    for (const auto& c : combos) min_sf = std::min(min_sf, c.sf);
    int ref_sf = kMaxSf + 1;
    for (const auto& c : combos)
        if (c.sf > min_sf) ref_sf = std::min(ref_sf, c.sf);

    // Reference: the weakest node of the class just above the fastest one
    // (the weakest node overall if only one class is in use), boosted to the
    // top level.
    double ref_gain = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (ref_sf <= kMaxSf && combos[i].sf != ref_sf) continue;
        ref_gain = std::min(ref_gain, reports[i].path_gain_db);
    }
    const double ref_power = ref_gain + max_level;

    Assignment out(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double gain = reports[i].path_gain_db;
        int tp;
        if (combos[i].sf == min_sf && gain + min_level > ref_power - min_cir) {
            tp = min_level;  // would corrupt the reference even at minimum power
        } else {
            tp = max_level;
            for (int lvl : ctx.pow_levels) {
                if (gain + lvl >= ref_power + min_cir) {
                    tp = lvl;
                    break;
                }
            }
        }
        out[i] = detail::make_params(combos[i], tp, ctx.cf_hz);
    }
    return out;
}

// Per-node greedy: the decodable combination with the shortest airtime, at the
// lowest power level that clears the sensitivity threshold. Nodes that cannot
// be decoded at all fall back to the slowest combination at full power.
inline Assignment baseline_sn5(const std::vector<NodeReport>& reports,
                               const AllocationContext& ctx) {
    if (reports.empty()) throw std::invalid_argument("baseline_sn5: no nodes");
    detail::check_pow_levels(ctx.pow_levels);
    detail::validate_deployment(ctx.deployed);

    std::vector<RateCombo> by_airtime = ctx.deployed;
    std::sort(by_airtime.begin(), by_airtime.end(), [&](const RateCombo& a, const RateCombo& b) {
        double ta = airtime(a.sf, a.bw_hz, a.cr_n, ctx.payload_len, ctx.airtime_opt);
        double tb = airtime(b.sf, b.bw_hz, b.cr_n, ctx.payload_len, ctx.airtime_opt);
        if (ta != tb) return ta < tb;
        return faster_than(a, b);
    });

    Assignment out(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double gain = reports[i].path_gain_db;
        bool found = false;
        for (const auto& c : by_airtime) {
            const double sens = ctx.sensitivity.at(c.sf, c.bw_hz);
            for (int lvl : ctx.pow_levels) {
                if (gain + lvl >= sens) {
                    out[i] = detail::make_params(c, lvl, ctx.cf_hz);
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) out[i] = detail::make_params(by_airtime.back(), ctx.pow_levels.back(), ctx.cf_hz);
    }
    return out;
}

// Fair data rates (whole cell or per region) combined with the balancing
// power control.
inline Assignment strategy_fadr(const std::vector<NodeReport>& reports,
                                const AllocationContext& ctx, int region_size = 0) {
    auto combos = assign_rates_by_region(reports, ctx.deployed, region_size, ctx.bw_weighting);
    auto power = fadr_power_control(reports, ctx.pow_levels, ctx.cir);
    Assignment out(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i)
        out[i] = detail::make_params(combos[i], power.tp_dbm[i], ctx.cf_hz);
    return out;
}

struct Strategy {
    enum class Kind { fadr_one_region, fadr_region, equal_sf, adelantado, reynders, sn5 };
    Kind kind = Kind::fadr_one_region;
    int region_size = 0;  // only for fadr_region
};

inline Strategy parse_strategy(const std::string& text) {
    Strategy s;
    if (text == "fadr-one-region") {
        s.kind = Strategy::Kind::fadr_one_region;
    } else if (text.rfind("fadr-region:", 0) == 0) {
        s.kind = Strategy::Kind::fadr_region;
        std::size_t pos = 0;
        const std::string arg = text.substr(12);
        int size = 0;
        try {
            size = std::stoi(arg, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("strategy: bad region size in '" + text + "'");
        }
        if (pos != arg.size() || size < 50)
            throw std::invalid_argument("strategy: region size must be an integer >= 50");
        s.region_size = size;
    } else if (text == "equal-sf") {
        s.kind = Strategy::Kind::equal_sf;
    } else if (text == "adelantado") {
        s.kind = Strategy::Kind::adelantado;
    } else if (text == "reynders") {
        s.kind = Strategy::Kind::reynders;
    } else if (text == "sn5") {
        s.kind = Strategy::Kind::sn5;
    } else {
        throw std::invalid_argument("strategy: unknown name '" + text + "'");
    }
    return s;
}

inline std::string strategy_name(const Strategy& s) {
    switch (s.kind) {
        case Strategy::Kind::fadr_one_region: return "fadr-one-region";
        case Strategy::Kind::fadr_region: return "fadr-region:" + std::to_string(s.region_size);
        case Strategy::Kind::equal_sf: return "equal-sf";
        case Strategy::Kind::adelantado: return "adelantado";
        case Strategy::Kind::reynders: return "reynders";
        case Strategy::Kind::sn5: return "sn5";
    }
    throw std::logic_error("strategy_name: unreachable");
}

inline Assignment apply_strategy(const Strategy& s, const std::vector<NodeReport>& reports,
                                 const AllocationContext& ctx) {
    switch (s.kind) {
        case Strategy::Kind::fadr_one_region: return strategy_fadr(reports, ctx, 0);
        case Strategy::Kind::fadr_region: return strategy_fadr(reports, ctx, s.region_size);
        case Strategy::Kind::equal_sf: return baseline_equal_sf(reports, ctx);
        case Strategy::Kind::adelantado: return baseline_adelantado(reports, ctx);
        case Strategy::Kind::reynders: return baseline_reynders(reports, ctx);
        case Strategy::Kind::sn5: return baseline_sn5(reports, ctx);
    }
    throw std::logic_error("apply_strategy: unreachable");
}

}  // namespace lorafair
