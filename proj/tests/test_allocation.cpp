#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "lorafair/allocation.hpp"
#include "lorafair/baselines.hpp"
#include "lorafair/random.hpp"

using namespace lorafair;

namespace {

std::vector<NodeReport> make_reports(const std::vector<double>& gains) {
    std::vector<NodeReport> out;
    for (std::size_t i = 0; i < gains.size(); ++i)
        out.push_back({static_cast<int>(i), gains[i], 20});
    return out;
}

// gains listed strongest-first for readability; ids follow the list order
std::vector<double> descending_gains(std::size_t n, double top, double step) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = top - step * static_cast<double>(i);
    return g;
}

int count_sf(const std::vector<RateCombo>& combos, int sf, std::size_t lo = 0,
             std::size_t hi = SIZE_MAX) {
    int c = 0;
    hi = std::min(hi, combos.size());
    for (std::size_t i = lo; i < hi; ++i)
        if (combos[i].sf == sf) ++c;
    return c;
}

}  // namespace

TEST_CASE("fair SF shares are the exact closed-form rationals") {
    auto p = fair_sf_ratios();
    const double denom = 498.0;  // sum of sf * 2^(12-sf) for sf 7..12, over 2^12
    const double expected[] = {224 / denom, 128 / denom, 72 / denom,
                               40 / denom,  22 / denom,  12 / denom};
    double sum = 0.0;
    for (int i = 0; i < kSfCount; ++i) {
        CHECK(p[i] == Catch::Approx(expected[i]).margin(1e-12));
        sum += p[i];
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("fair SF shares round to the published four-decimal values") {
    auto p = fair_sf_ratios();
    const double published[] = {0.4498, 0.2570, 0.1446, 0.0803, 0.0442, 0.0241};
    for (int i = 0; i < kSfCount; ++i)
        CHECK(p[i] == Catch::Approx(published[i]).margin(5e-5));
}

TEST_CASE("single-bandwidth deployment leaves the SF shares untouched") {
    auto ratios = fair_rate_ratios(default_deployment());
    auto p = fair_sf_ratios();
    REQUIRE(ratios.size() == 6);
    for (const auto& r : ratios)
        CHECK(r.ratio == Catch::Approx(p[r.combo.sf - kMinSf]).margin(1e-12));
    // fastest first
    CHECK(ratios.front().combo.sf == 7);
    CHECK(ratios.back().combo.sf == 12);
}

TEST_CASE("missing SFs renormalize the deployed shares") {
    auto ratios = fair_rate_ratios({{7, 125000, 1}, {8, 125000, 1}});
    REQUIRE(ratios.size() == 2);
    CHECK(ratios[0].ratio == Catch::Approx(224.0 / 352.0).margin(1e-12));
    CHECK(ratios[1].ratio == Catch::Approx(128.0 / 352.0).margin(1e-12));
}

TEST_CASE("bandwidth split: linear weighting") {
    std::vector<RateCombo> dep = {{7, 125000, 1}, {7, 250000, 1}, {8, 125000, 1},
                                  {9, 125000, 1}, {10, 125000, 1}, {11, 125000, 1},
                                  {12, 125000, 1}};
    auto ratios = fair_rate_ratios(dep, BwWeighting::linear);
    double p7 = fair_sf_ratios()[0];
    double p7_125 = 0, p7_250 = 0;
    for (const auto& r : ratios) {
        if (r.combo.sf != 7) continue;
        (r.combo.bw_hz == 125000 ? p7_125 : p7_250) = r.ratio;
    }
    CHECK(p7_125 == Catch::Approx(p7 / 3.0).margin(1e-12));
    CHECK(p7_250 == Catch::Approx(2.0 * p7 / 3.0).margin(1e-12));
    CHECK(p7_125 == Catch::Approx(0.149933).margin(1e-6));
    CHECK(p7_250 == Catch::Approx(0.299866).margin(1e-6));
    CHECK(p7_125 + p7_250 == Catch::Approx(p7).margin(1e-12));
}

TEST_CASE("bandwidth split: quadratic weighting reproduces the 1:4 split") {
    std::vector<RateCombo> dep = {{7, 125000, 1}, {7, 250000, 1}, {8, 125000, 1},
                                  {9, 125000, 1}, {10, 125000, 1}, {11, 125000, 1},
                                  {12, 125000, 1}};
    auto ratios = fair_rate_ratios(dep, BwWeighting::quadratic);
    double p7_125 = 0, p7_250 = 0;
    for (const auto& r : ratios) {
        if (r.combo.sf != 7) continue;
        (r.combo.bw_hz == 125000 ? p7_125 : p7_250) = r.ratio;
    }
    CHECK(p7_250 / p7_125 == Catch::Approx(4.0).margin(1e-9));
    CHECK(p7_125 == Catch::Approx(0.0899).margin(5e-4));
    CHECK(p7_250 == Catch::Approx(0.3598).margin(5e-4));
    CHECK(p7_125 + p7_250 == Catch::Approx(fair_sf_ratios()[0]).margin(1e-12));
}

TEST_CASE("coding-rate split preserves the (sf, bw) marginal") {
    std::vector<RateCombo> dep = default_deployment();
    dep.push_back({7, 125000, 3});  // SF7 deployed at CR 4/5 and 4/7
    auto ratios = fair_rate_ratios(dep);
    double p1 = 0, p3 = 0, total = 0;
    for (const auto& r : ratios) {
        total += r.ratio;
        if (r.combo.sf != 7) continue;
        (r.combo.cr_n == 1 ? p1 : p3) = r.ratio;
    }
    CHECK(p1 / p3 == Catch::Approx((4.0 / 5.0) / (4.0 / 7.0)).margin(1e-12));
    CHECK(p1 + p3 == Catch::Approx(fair_sf_ratios()[0]).margin(1e-12));
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("deployment validation") {
    CHECK_THROWS_AS(fair_rate_ratios({}), std::invalid_argument);
    CHECK_THROWS_AS(fair_rate_ratios({{6, 125000, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(fair_rate_ratios({{7, 125000, 1}, {7, 125000, 1}}), std::invalid_argument);
}

TEST_CASE("largest-remainder counts for the reference cell sizes") {
    auto ratios = fair_rate_ratios(default_deployment());

    auto c50 = ratios_to_counts(50, ratios);
    const int expected50[] = {23, 13, 7, 4, 2, 1};
    int sum = 0;
    for (int i = 0; i < 6; ++i) {
        CHECK(c50[i].count == expected50[i]);
        sum += c50[i].count;
    }
    CHECK(sum == 50);

    auto c1000 = ratios_to_counts(1000, ratios);
    const int expected1000[] = {450, 257, 145, 80, 44, 24};
    sum = 0;
    for (int i = 0; i < 6; ++i) {
        CHECK(c1000[i].count == expected1000[i]);
        sum += c1000[i].count;
    }
    CHECK(sum == 1000);
}

TEST_CASE("exact halves split without remainder") {
    RateRatios r = {{{7, 125000, 1}, 0.5}, {{8, 125000, 1}, 0.5}};
    auto c = ratios_to_counts(100, r);
    CHECK(c[0].count == 50);
    CHECK(c[1].count == 50);
}

TEST_CASE("count input validation") {
    auto ratios = fair_rate_ratios(default_deployment());
    CHECK_THROWS_AS(ratios_to_counts(-1, ratios), std::invalid_argument);
    RateRatios bad = {{{7, 125000, 1}, 0.4}, {{8, 125000, 1}, 0.4}};
    CHECK_THROWS_AS(ratios_to_counts(10, bad), std::invalid_argument);
}

TEST_CASE("whole-cell assignment hands rates out ordered, fastest to strongest") {
    auto reports = make_reports(descending_gains(100, -60.0, 0.5));
    auto combos = assign_rates_by_region(reports, default_deployment());
    // counts for n=100: {45, 26, 15, 8, 4, 2}
    CHECK(count_sf(combos, 7, 0, 45) == 45);
    CHECK(count_sf(combos, 8, 45, 71) == 26);
    CHECK(combos[98].sf == 12);
    CHECK(combos[99].sf == 12);
}

TEST_CASE("regioned assignment keeps the ratio mix inside every region") {
    auto reports = make_reports(descending_gains(100, -60.0, 0.5));
    auto combos = assign_rates_by_region(reports, default_deployment(), 50);
    // both regions carry the 50-node mix {23, 13, 7, 4, 2, 1}
    for (std::size_t lo : {std::size_t{0}, std::size_t{50}}) {
        CHECK(count_sf(combos, 7, lo, lo + 50) == 23);
        CHECK(count_sf(combos, 8, lo, lo + 50) == 13);
        CHECK(count_sf(combos, 12, lo, lo + 50) == 1);
    }
    // interleaving spreads SF7 through each region rather than clustering it
    CHECK(count_sf(combos, 7, 0, 25) >= 9);
    CHECK(count_sf(combos, 7, 25, 50) >= 9);
}

TEST_CASE("the last region absorbs the remainder") {
    auto reports = make_reports(descending_gains(120, -60.0, 0.5));
    auto combos = assign_rates_by_region(reports, default_deployment(), 50);
    // 120 nodes, region 50: two regions sized 50 and 70
    CHECK(count_sf(combos, 12, 0, 50) == 1);
    CHECK(count_sf(combos, 12, 50, 120) == 2);
    CHECK(count_sf(combos, 7, 50, 120) == 31);
}

TEST_CASE("a region covering the whole cell equals the one-region mode") {
    auto reports = make_reports(descending_gains(60, -70.0, 0.25));
    auto whole = assign_rates_by_region(reports, default_deployment(), 0);
    auto big = assign_rates_by_region(reports, default_deployment(), 60);
    CHECK(whole == big);
}

TEST_CASE("region size below the minimum is rejected") {
    auto reports = make_reports(descending_gains(100, -60.0, 0.5));
    CHECK_THROWS_AS(assign_rates_by_region(reports, default_deployment(), 49),
                    std::invalid_argument);
    CHECK_THROWS_AS(assign_rates_by_region({}, default_deployment()), std::invalid_argument);
}

TEST_CASE("power control reproduces the three-node hand trace") {
    auto res = fadr_power_control(make_reports({-60.0, -90.0, -100.0}), {2, 5, 8, 11, 14},
                                  CirMatrix{});
    REQUIRE(res.tp_dbm.size() == 3);
    CHECK(res.tp_dbm[0] == 2);
    CHECK(res.tp_dbm[1] == 5);
    CHECK(res.tp_dbm[2] == 14);
    CHECK(res.min_power == 2);
    CHECK(res.max_power == 14);
    // resulting received powers: -58, -85, -86 — the two weak nodes balanced
    CHECK(-90.0 + res.tp_dbm[1] == Catch::Approx(-85.0));
    CHECK(-100.0 + res.tp_dbm[2] == Catch::Approx(-86.0));
}

TEST_CASE("equal gains all drop to minimum power") {
    auto res = fadr_power_control(make_reports({-80.0, -80.0, -80.0, -80.0}), {2, 5, 8, 11, 14},
                                  CirMatrix{});
    for (int tp : res.tp_dbm) CHECK(tp == 2);
}

TEST_CASE("a single node gets minimum power") {
    auto res = fadr_power_control(make_reports({-120.0}), {2, 5, 8, 11, 14}, CirMatrix{});
    CHECK(res.tp_dbm == std::vector<int>{2});
}

TEST_CASE("a ~50 dB spread forces the top MaxPower") {
    auto res = fadr_power_control(make_reports(descending_gains(20, -60.0, 50.0 / 19.0)),
                                  {2, 5, 8, 11, 14}, CirMatrix{});
    CHECK(res.max_power == 14);
}

TEST_CASE("power control properties: monotone, shift-invariant, balanced") {
    Rng rng(2024, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(rng.below(40));
        // spread capped at span - MinCIR = 6 dB for the balance property
        std::vector<double> gains;
        double base = rng.uniform(-140.0, -70.0);
        for (std::size_t i = 0; i < n; ++i) gains.push_back(base + rng.uniform(0.0, 6.0));
        auto reports = make_reports(gains);
        auto res = fadr_power_control(reports, {2, 5, 8, 11, 14}, CirMatrix{});

        double min_post = 1e9;
        for (std::size_t i = 0; i < n; ++i)
            min_post = std::min(min_post, gains[i] + res.tp_dbm[i]);
        for (std::size_t i = 0; i < n; ++i) {
            if (res.tp_dbm[i] == res.max_power)
                CHECK(std::fabs(gains[i] + res.tp_dbm[i] - min_post) <= 6.0 + 1e-9);
            for (std::size_t j = 0; j < n; ++j)
                if (gains[i] > gains[j]) CHECK(res.tp_dbm[i] <= res.tp_dbm[j]);
        }

        std::vector<double> shifted = gains;
        for (double& g : shifted) g += 17.5;
        auto res2 = fadr_power_control(make_reports(shifted), {2, 5, 8, 11, 14}, CirMatrix{});
        CHECK(res2.tp_dbm == res.tp_dbm);
    }
}

TEST_CASE("power control visit count stays linear") {
    Rng rng(7, 0);
    for (std::size_t n : {std::size_t{100}, std::size_t{1000}, std::size_t{10000}}) {
        std::vector<double> gains;
        for (std::size_t i = 0; i < n; ++i) gains.push_back(rng.uniform(-150.0, -90.0));
        auto res = fadr_power_control(make_reports(gains), {2, 5, 8, 11, 14}, CirMatrix{});
        CHECK(res.visits <= 4 * static_cast<long>(n));
    }
}

TEST_CASE("power control input validation") {
    CHECK_THROWS_AS(fadr_power_control({}, {2, 5}, CirMatrix{}), std::invalid_argument);
    auto reports = make_reports({-80.0});
    CHECK_THROWS_AS(fadr_power_control(reports, {}, CirMatrix{}), std::invalid_argument);
    CHECK_THROWS_AS(fadr_power_control(reports, {5, 2}, CirMatrix{}), std::invalid_argument);
    CHECK_THROWS_AS(fadr_power_control(reports, {2, 2, 5}, CirMatrix{}), std::invalid_argument);
}

TEST_CASE("equal-SF baseline splits the cell evenly, strongest to SF7") {
    AllocationContext ctx;
    auto r600 = baseline_equal_sf(make_reports(descending_gains(600, -60.0, 0.1)), ctx);
    std::map<int, int> per_sf;
    for (const auto& p : r600) per_sf[p.sf] += 1;
    for (int sf = 7; sf <= 12; ++sf) CHECK(per_sf[sf] == 100);
    CHECK(r600[0].sf == 7);       // strongest node
    CHECK(r600[599].sf == 12);    // weakest node
    for (const auto& p : r600) CHECK(p.tp_dbm == 14);

    auto r6 = baseline_equal_sf(make_reports(descending_gains(6, -60.0, 5.0)), ctx);
    for (int i = 0; i < 6; ++i) CHECK(r6[i].sf == 7 + i);

    auto r1000 = baseline_equal_sf(make_reports(descending_gains(1000, -60.0, 0.05)), ctx);
    per_sf.clear();
    for (const auto& p : r1000) per_sf[p.sf] += 1;
    CHECK(per_sf[7] == 167);
    CHECK(per_sf[10] == 167);
    CHECK(per_sf[11] == 166);
    CHECK(per_sf[12] == 166);
}

TEST_CASE("28%-to-slowest baseline") {
    AllocationContext ctx;
    auto out = baseline_adelantado(make_reports(descending_gains(100, -60.0, 0.5)), ctx);
    std::map<int, int> per_sf;
    for (const auto& p : out) per_sf[p.sf] += 1;
    CHECK(per_sf[12] == 28);
    CHECK(per_sf[7] == 14);
    CHECK(per_sf[8] == 14);
    CHECK(per_sf[9] == 14);
    CHECK(per_sf[10] == 15);
    CHECK(per_sf[11] == 15);
    // the 28 weakest nodes carry the slowest SF
    for (std::size_t i = 72; i < 100; ++i) CHECK(out[i].sf == 12);
    for (const auto& p : out) CHECK(p.tp_dbm == 14);
}

TEST_CASE("reference-anchored baseline: fast corruptors pinned low, the rest boosted") {
    AllocationContext ctx;
    auto reports = make_reports(descending_gains(20, -40.0, 2.0));
    auto out = baseline_reynders(reports, ctx);
    // n=20 fair counts: SF7 x9, SF8 x5, SF9 x3, SF10 x2, SF11 x1; reference is
    // the weakest SF8 node (gain -66, boosted to -52). Every SF7 node can
    // corrupt it even at 2 dBm, so SF7 is pinned to 2; everyone else boosts.
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].sf == 7)
            CHECK(out[i].tp_dbm == 2);
        else
            CHECK(out[i].tp_dbm == 14);
    }
}

TEST_CASE("reference-anchored baseline: no corruptors when gains are tight") {
    AllocationContext ctx;
    auto out = baseline_reynders(make_reports(std::vector<double>(20, -60.0)), ctx);
    for (const auto& p : out) CHECK(p.tp_dbm == 14);
}

TEST_CASE("reference-anchored baseline: single deployed class falls back to the weakest node") {
    AllocationContext ctx;
    ctx.deployed = {{7, 125000, 1}};
    auto out = baseline_reynders(make_reports(descending_gains(20, -40.0, 2.0)), ctx);
    // reference: weakest node (-78) at 14 dBm -> -64; corruptors are those
    // with gain + 2 > -70, i.e. gains above -72 (ranks 0..15)
    for (std::size_t i = 0; i < 16; ++i) CHECK(out[i].tp_dbm == 2);
    for (std::size_t i = 16; i < 20; ++i) CHECK(out[i].tp_dbm == 14);
}

TEST_CASE("greedy baseline picks the fastest decodable combination at minimum power") {
    AllocationContext ctx;
    auto out = baseline_sn5(make_reports({-120.0, -156.4, -158.0}), ctx);
    CHECK(out[0].sf == 7);
    CHECK(out[0].tp_dbm == 2);
    CHECK(out[1].sf == 7);
    CHECK(out[1].tp_dbm == 2);  // -156.4 + 2 = -154.4, just above the -155 floor
    CHECK(out[2].sf == 7);
    CHECK(out[2].tp_dbm == 5);  // -158 + 2 is below the floor, +5 clears it
}

TEST_CASE("greedy baseline prefers wider bandwidth and ladders SFs under table sensitivity") {
    AllocationContext ctx;
    ctx.deployed = {{7, 125000, 1}, {7, 250000, 1}};
    auto wide = baseline_sn5(make_reports({-100.0}), ctx);
    CHECK(wide[0].bw_hz == 250000);

    AllocationContext tab;
    tab.sensitivity.mode = SensitivityMode::table;
    auto out = baseline_sn5(make_reports({-140.0}), tab);
    CHECK(out[0].sf == 8);  // SF7 undecodable even at 14 dBm under table sensitivity
    CHECK(out[0].tp_dbm == 14);
}

TEST_CASE("greedy baseline falls back to the slowest combination when nothing decodes") {
    AllocationContext ctx;
    auto out = baseline_sn5(make_reports({-170.0}), ctx);
    CHECK(out[0].sf == 12);
    CHECK(out[0].tp_dbm == 14);
}

TEST_CASE("strategy names parse and round-trip") {
    CHECK(parse_strategy("fadr-one-region").kind == Strategy::Kind::fadr_one_region);
    CHECK(parse_strategy("equal-sf").kind == Strategy::Kind::equal_sf);
    CHECK(parse_strategy("adelantado").kind == Strategy::Kind::adelantado);
    CHECK(parse_strategy("reynders").kind == Strategy::Kind::reynders);
    CHECK(parse_strategy("sn5").kind == Strategy::Kind::sn5);
    auto s = parse_strategy("fadr-region:75");
    CHECK(s.kind == Strategy::Kind::fadr_region);
    CHECK(s.region_size == 75);
    CHECK(strategy_name(s) == "fadr-region:75");
    CHECK_THROWS_AS(parse_strategy("fadr-region:49"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy("fadr-region:abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy("unknown"), std::invalid_argument);
}

TEST_CASE("the dispatcher produces a params entry per node") {
    auto reports = make_reports(descending_gains(120, -70.0, 0.3));
    AllocationContext ctx;
    for (const char* name : {"fadr-one-region", "fadr-region:50", "equal-sf", "adelantado",
                             "reynders", "sn5"}) {
        auto out = apply_strategy(parse_strategy(name), reports, ctx);
        REQUIRE(out.size() == reports.size());
        for (const auto& p : out) CHECK_NOTHROW(p.validate());
    }
}
