#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lorafair {

inline constexpr int kMinSf = 7;
inline constexpr int kMaxSf = 12;
inline constexpr int kSfCount = kMaxSf - kMinSf + 1;
inline constexpr int kMaxPayload = 255;

constexpr bool valid_sf(int sf) { return sf >= kMinSf && sf <= kMaxSf; }
constexpr bool valid_bw(int bw_hz) {
    return bw_hz == 125000 || bw_hz == 250000 || bw_hz == 500000;
}
constexpr bool valid_cr_n(int n) { return n >= 1 && n <= 4; }

// One radio configuration. cr is stored as the denominator index n of
// 4/(4+n); coding_rate() yields the fraction.
struct TxParams {
    int sf = 7;
    int bw_hz = 125000;
    int cr_n = 1;
    int tp_dbm = 14;
    double cf_hz = 868e6;

    double coding_rate() const { return 4.0 / (4.0 + cr_n); }

    void validate() const {
        if (!valid_sf(sf)) throw std::invalid_argument("sf out of range 7..12");
        if (!valid_bw(bw_hz)) throw std::invalid_argument("bw must be 125/250/500 kHz");
        if (!valid_cr_n(cr_n)) throw std::invalid_argument("cr index out of range 1..4");
        if (tp_dbm < 2 || tp_dbm > 14) throw std::invalid_argument("tp out of range 2..14 dBm");
        if (!(cf_hz > 0)) throw std::invalid_argument("cf must be positive");
    }

    bool operator==(const TxParams&) const = default;
};

// Raw modulation bit rate in bit/s: sf * (bw / 2^sf) * cr.
inline double bit_rate(int sf, int bw_hz, int cr_n) {
    if (!valid_sf(sf) || !valid_bw(bw_hz) || !valid_cr_n(cr_n))
        throw std::invalid_argument("bit_rate: invalid radio parameters");
    double chips = static_cast<double>(std::int64_t{1} << sf);
    return sf * (bw_hz / chips) * (4.0 / (4.0 + cr_n));
}

// Low-data-rate optimization default: on for SF11/SF12 at 125 kHz.
inline bool default_ldro(int sf, int bw_hz) { return sf >= 11 && bw_hz == 125000; }

struct AirtimeOptions {
    int preamble_symbols = 8;
    bool explicit_header = true;
    bool crc_on = true;
    int ldro = -1;  // -1: apply default_ldro; 0/1: force off/on
};

// Frame duration in seconds for a payload_len-byte frame (transceiver symbol
// formula: preamble of n_pre + 4.25 symbols plus 8 + ceil-term payload
// symbols).
inline double airtime(int sf, int bw_hz, int cr_n, int payload_len,
                      const AirtimeOptions& opt = {}) {
    if (!valid_sf(sf) || !valid_bw(bw_hz) || !valid_cr_n(cr_n))
        throw std::invalid_argument("airtime: invalid radio parameters");
    if (payload_len < 1 || payload_len > kMaxPayload)
        throw std::invalid_argument("airtime: payload length out of range 1..255");
    if (opt.preamble_symbols < 6)
        throw std::invalid_argument("airtime: preamble below 6 symbols");

    bool ldro = opt.ldro < 0 ? default_ldro(sf, bw_hz) : opt.ldro != 0;
    double t_sym = static_cast<double>(std::int64_t{1} << sf) / bw_hz;
    double t_preamble = (opt.preamble_symbols + 4.25) * t_sym;

    int numer = 8 * payload_len - 4 * sf + 28 + (opt.crc_on ? 16 : 0) -
                20 * (opt.explicit_header ? 0 : 1);
    int denom = 4 * (sf - (ldro ? 2 : 0));
    int groups = numer <= 0 ? 0 : (numer + denom - 1) / denom;
    int payload_symbols = 8 + groups * (cr_n + 4);
    return t_preamble + payload_symbols * t_sym;
}

inline double airtime(const TxParams& p, int payload_len, const AirtimeOptions& opt = {}) {
    return airtime(p.sf, p.bw_hz, p.cr_n, payload_len, opt);
}

// Transmit power draw in mW per TP level, 2..14 dBm. Defaults are
// transceiver-datasheet-class supply currents at 3.0 V, strictly increasing.
struct EnergyProfile {
    static constexpr int kMinTp = 2;
    static constexpr int kMaxTp = 14;
    std::array<double, kMaxTp - kMinTp + 1> draw_mw = {
        72.0, 75.0, 78.0, 81.0, 84.0, 87.0, 90.0, 96.0, 102.0, 108.0, 117.0, 126.0, 132.0,
    };

    double at(int tp_dbm) const {
        if (tp_dbm < kMinTp || tp_dbm > kMaxTp)
            throw std::invalid_argument("EnergyProfile: tp " + std::to_string(tp_dbm) +
                                        " dBm outside configured 2..14 range");
        return draw_mw[static_cast<std::size_t>(tp_dbm - kMinTp)];
    }
};

// Energy in joules to transmit one frame.
inline double tx_energy(const TxParams& p, int payload_len, const EnergyProfile& profile = {},
                        const AirtimeOptions& opt = {}) {
    return airtime(p, payload_len, opt) * profile.at(p.tp_dbm) * 1e-3;
}

enum class SensitivityMode { floor, table };

// Gateway sensitivity in dBm. Default mode is the flat floor used throughout
// the reference studies; table mode derives per-(sf, bw) values from thermal
// noise + 6 dB NF + the SF demodulation SNR limit.
struct SensitivityModel {
    SensitivityMode mode = SensitivityMode::floor;
    double floor_dbm = -155.0;

    double at(int sf, int bw_hz) const {
        if (!valid_sf(sf) || !valid_bw(bw_hz))
            throw std::invalid_argument("sensitivity: invalid (sf, bw)");
        if (mode == SensitivityMode::floor) return floor_dbm;
        double snr_limit = -7.5 - 2.5 * (sf - kMinSf);
        return -174.0 + 10.0 * std::log10(static_cast<double>(bw_hz)) + 6.0 + snr_limit;
    }
};

// Co-channel rejection thresholds in dB, indexed [reference sf][interferer
// sf]. cir(a, b) is the margin signal a needs over an SF-b interferer.
struct CirMatrix {
    std::array<std::array<double, kSfCount>, kSfCount> db;

    explicit CirMatrix(double uniform_db = 6.0) {
        for (auto& row : db) row.fill(uniform_db);
    }

    double at(int sf_ref, int sf_int) const {
        if (!valid_sf(sf_ref) || !valid_sf(sf_int))
            throw std::invalid_argument("CirMatrix: sf out of range");
        return db[static_cast<std::size_t>(sf_ref - kMinSf)][static_cast<std::size_t>(sf_int - kMinSf)];
    }

    double& at(int sf_ref, int sf_int) {
        if (!valid_sf(sf_ref) || !valid_sf(sf_int))
            throw std::invalid_argument("CirMatrix: sf out of range");
        return db[static_cast<std::size_t>(sf_ref - kMinSf)][static_cast<std::size_t>(sf_int - kMinSf)];
    }

    double min() const {
        double m = db[0][0];
        for (const auto& row : db)
            for (double v : row)
                if (v < m) m = v;
        return m;
    }
};

}  // namespace lorafair
