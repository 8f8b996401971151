#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lorafair/phy.hpp"

using namespace lorafair;

namespace {

// Independent reference airtime: same transceiver formula, evaluated with
// floating-point ceil instead of integer arithmetic.
double reference_airtime(int sf, int bw_hz, int cr_n, int payload_len, bool ldro,
                         int preamble = 8, bool explicit_header = true, bool crc = true) {
    double t_sym = std::pow(2.0, sf) / bw_hz;
    double t_pre = (preamble + 4.25) * t_sym;
    double numer = 8.0 * payload_len - 4.0 * sf + 28.0 + (crc ? 16.0 : 0.0) -
                   20.0 * (explicit_header ? 0.0 : 1.0);
    double groups = std::max(std::ceil(numer / (4.0 * (sf - (ldro ? 2.0 : 0.0)))), 0.0);
    double n_payload = 8.0 + groups * (cr_n + 4.0);
    return t_pre + n_payload * t_sym;
}

}  // namespace

TEST_CASE("bit rate follows sf * (bw / 2^sf) * cr") {
    CHECK(bit_rate(7, 125000, 1) == Catch::Approx(5468.75).epsilon(1e-12));
    CHECK(bit_rate(10, 125000, 1) == Catch::Approx(976.5625).epsilon(1e-12));
    CHECK(bit_rate(8, 250000, 3) == Catch::Approx(8.0 * (250000.0 / 256.0) * (4.0 / 7.0)).epsilon(1e-12));
    CHECK(bit_rate(12, 500000, 4) == Catch::Approx(12.0 * (500000.0 / 4096.0) * 0.5).epsilon(1e-12));
}

TEST_CASE("bit rate rejects invalid parameters") {
    CHECK_THROWS_AS(bit_rate(6, 125000, 1), std::invalid_argument);
    CHECK_THROWS_AS(bit_rate(13, 125000, 1), std::invalid_argument);
    CHECK_THROWS_AS(bit_rate(7, 100000, 1), std::invalid_argument);
    CHECK_THROWS_AS(bit_rate(7, 125000, 0), std::invalid_argument);
    CHECK_THROWS_AS(bit_rate(7, 125000, 5), std::invalid_argument);
}

TEST_CASE("airtime matches frozen hand-computed values for the reference frame") {
    // 80-byte payload, 125 kHz, CR 4/5, preamble 8, explicit header, CRC on,
    // LDRO auto (on for SF11/SF12 at 125 kHz).
    const double expected[] = {0.143616, 0.256512, 0.451584, 0.862208, 1.806336, 3.284992};
    for (int sf = kMinSf; sf <= kMaxSf; ++sf)
        CHECK(airtime(sf, 125000, 1, 80) == Catch::Approx(expected[sf - kMinSf]).margin(1e-12));
}

TEST_CASE("airtime agrees with an independent evaluation across the grid") {
    for (int sf = kMinSf; sf <= kMaxSf; ++sf)
        for (int bw : {125000, 250000, 500000})
            for (int cr_n : {1, 2, 3, 4})
                for (int pl = 1; pl <= 255; pl += 13) {
                    bool ldro = default_ldro(sf, bw);
                    CHECK(airtime(sf, bw, cr_n, pl) ==
                          Catch::Approx(reference_airtime(sf, bw, cr_n, pl, ldro)).margin(1e-12));
                }
}

TEST_CASE("each SF step roughly doubles the airtime") {
    for (int sf = kMinSf; sf < kMaxSf; ++sf) {
        AirtimeOptions opt;
        opt.ldro = 0;  // isolate the SF effect
        double ratio = airtime(sf + 1, 125000, 1, 80, opt) / airtime(sf, 125000, 1, 80, opt);
        CHECK(ratio > 1.5);
        CHECK(ratio < 2.5);
    }
}

TEST_CASE("doubling the bandwidth halves the frame airtime") {
    AirtimeOptions opt;
    opt.ldro = 0;
    for (int sf : {7, 9, 11})
        CHECK(airtime(sf, 250000, 1, 80, opt) ==
              Catch::Approx(airtime(sf, 125000, 1, 80, opt) / 2.0).margin(1e-12));
}

TEST_CASE("airtime is monotone in payload length") {
    for (int sf : {7, 12}) {
        for (int pl = 1; pl < 255; ++pl)
            CHECK(airtime(sf, 125000, 1, pl + 1) >= airtime(sf, 125000, 1, pl));
        // a 16-byte step always crosses at least one interleaving block
        for (int pl = 1; pl + 16 <= 255; pl += 16)
            CHECK(airtime(sf, 125000, 1, pl + 16) > airtime(sf, 125000, 1, pl));
    }
}

TEST_CASE("airtime option and range errors") {
    CHECK_THROWS_AS(airtime(7, 125000, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(airtime(7, 125000, 1, 256), std::invalid_argument);
    AirtimeOptions opt;
    opt.preamble_symbols = 5;
    CHECK_THROWS_AS(airtime(7, 125000, 1, 80, opt), std::invalid_argument);
}

TEST_CASE("low-data-rate optimization default") {
    CHECK(default_ldro(11, 125000));
    CHECK(default_ldro(12, 125000));
    CHECK_FALSE(default_ldro(10, 125000));
    CHECK_FALSE(default_ldro(11, 250000));
    CHECK_FALSE(default_ldro(12, 500000));
}

TEST_CASE("TxParams validation") {
    TxParams p;
    CHECK_NOTHROW(p.validate());
    p.tp_dbm = 1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.tp_dbm = 15;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TxParams{};
    p.sf = 6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TxParams{};
    CHECK(p.coding_rate() == Catch::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("energy profile is strictly increasing and range-checked") {
    EnergyProfile prof;
    for (int tp = EnergyProfile::kMinTp; tp < EnergyProfile::kMaxTp; ++tp)
        CHECK(prof.at(tp + 1) > prof.at(tp));
    CHECK_THROWS_AS(prof.at(1), std::invalid_argument);
    CHECK_THROWS_AS(prof.at(15), std::invalid_argument);
}

TEST_CASE("frame energy: frozen value and airtime dominance") {
    TxParams p;  // sf7, 125k, cr 4/5
    p.tp_dbm = 14;
    CHECK(tx_energy(p, 80) == Catch::Approx(0.143616 * 132.0 * 1e-3).margin(1e-12));

    TxParams slow;
    slow.sf = 12;
    slow.tp_dbm = 2;
    // the slowest frame at minimum power costs far more than the fastest at
    // maximum power: airtime dominates the level-dependent draw
    CHECK(tx_energy(slow, 80) > tx_energy(p, 80));
}

TEST_CASE("sensitivity model") {
    SensitivityModel floor;
    CHECK(floor.at(7, 125000) == Catch::Approx(-155.0));
    CHECK(floor.at(12, 500000) == Catch::Approx(-155.0));

    SensitivityModel table;
    table.mode = SensitivityMode::table;
    double sf7 = -174.0 + 10.0 * std::log10(125000.0) + 6.0 - 7.5;
    CHECK(table.at(7, 125000) == Catch::Approx(sf7).margin(1e-9));
    CHECK(table.at(12, 125000) == Catch::Approx(sf7 - 12.5).margin(1e-9));
    CHECK(table.at(7, 250000) == Catch::Approx(sf7 + 10.0 * std::log10(2.0)).margin(1e-9));
    CHECK_THROWS_AS(table.at(6, 125000), std::invalid_argument);
}

TEST_CASE("co-channel rejection matrix") {
    CirMatrix cir;
    for (int a = kMinSf; a <= kMaxSf; ++a)
        for (int b = kMinSf; b <= kMaxSf; ++b)
            CHECK(cir.at(a, b) == Catch::Approx(6.0));
    CHECK(cir.min() == Catch::Approx(6.0));
    cir.at(9, 12) = 3.5;
    CHECK(cir.min() == Catch::Approx(3.5));
    CHECK_THROWS_AS(cir.at(6, 7), std::invalid_argument);
}
