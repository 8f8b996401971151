#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lorafair/config.hpp"
#include "lorafair/metrics.hpp"
#include "lorafair/sim.hpp"

namespace lorafair {

namespace detail {

inline std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

// Mean and sample standard deviation (n-1 denominator; 0 for a single value).
inline MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return out;
}

}  // namespace detail

struct SweepRow {
    std::string sweep_value;
    std::string strategy;
    int seed_count = 0;
    detail::MeanStd der, jain, energy_j;
    std::array<double, kSfCount> sf_der_mean{};
};

inline std::string csv_header() {
    std::string h = "sweep_value,strategy,seed_count,der_mean,der_std,jain_mean,jain_std,"
                    "energy_j_mean,energy_j_std";
    for (int sf = kMinSf; sf <= kMaxSf; ++sf) h += ",der_sf" + std::to_string(sf);
    return h;
}

inline std::string csv_row(const SweepRow& r) {
    using detail::fmt6;
    std::string out = r.sweep_value + "," + r.strategy + "," + std::to_string(r.seed_count) + "," +
                      fmt6(r.der.mean) + "," + fmt6(r.der.std) + "," + fmt6(r.jain.mean) + "," +
                      fmt6(r.jain.std) + "," + fmt6(r.energy_j.mean) + "," + fmt6(r.energy_j.std);
    for (double v : r.sf_der_mean) out += "," + fmt6(v);
    return out;
}

// Runs one scenario across the seed list and aggregates the headline metrics.
inline SweepRow run_point(const Scenario& sc, const std::vector<std::uint64_t>& seeds,
                          const std::string& sweep_value) {
    if (seeds.empty()) throw std::invalid_argument("run_point: no seeds");
    SweepRow row;
    row.sweep_value = sweep_value;
    row.strategy = strategy_name(sc.strategy);
    row.seed_count = static_cast<int>(seeds.size());
    std::vector<double> ders, jains, energies;
    std::array<double, kSfCount> sf_acc{};
    for (std::uint64_t seed : seeds) {
        MetricsReport rep = compute_metrics(run(sc, seed));
        ders.push_back(rep.overall_der);
        jains.push_back(rep.jain);
        energies.push_back(rep.total_energy_j);
        for (int s = 0; s < kSfCount; ++s)
            sf_acc[static_cast<std::size_t>(s)] += rep.sf_der[static_cast<std::size_t>(s)];
    }
    row.der = detail::mean_std(ders);
    row.jain = detail::mean_std(jains);
    row.energy_j = detail::mean_std(energies);
    for (int s = 0; s < kSfCount; ++s)
        row.sf_der_mean[static_cast<std::size_t>(s)] =
            sf_acc[static_cast<std::size_t>(s)] / static_cast<double>(seeds.size());
    return row;
}

inline bool valid_sweep_axis(const std::string& axis) {
    return axis == "n_nodes" || axis == "radius_m" || axis == "distribution" || axis == "strategy";
}

// Default worker count: LORAFAIR_WORKERS if set and positive, else 1.
inline int default_workers() {
    const char* env = std::getenv("LORAFAIR_WORKERS");
    if (!env) return 1;
    try {
        int v = std::stoi(env);
        return v >= 1 ? v : 1;
    } catch (const std::exception&) {
        return 1;
    }
}

// Runs every (axis value) point across the seed list. All scenarios are built
// and validated before any run starts; points execute on up to `workers`
// threads, and rows come back in sweep order regardless of completion order.
inline std::vector<SweepRow> run_sweep(const Scenario& base, const std::string& axis,
                                       const std::vector<std::string>& values,
                                       const std::vector<std::uint64_t>& seeds, int workers) {
    if (!valid_sweep_axis(axis))
        throw std::invalid_argument(
            "sweep: axis must be one of n_nodes, radius_m, distribution, strategy");
    if (values.empty()) throw std::invalid_argument("sweep: no axis values");
    if (seeds.empty()) throw std::invalid_argument("sweep: no seeds");
    if (workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");

    std::vector<Scenario> points;
    for (const std::string& v : values) {
        Scenario sc = base;
        apply_scenario_key(sc, axis, v);
        sc.validate();
        points.push_back(sc);
    }

    std::vector<SweepRow> rows(points.size());
    std::vector<std::string> errors(points.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            try {
                rows[i] = run_point(points[i], seeds, values[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers == 1 || points.size() == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        int count = std::min<int>(workers, static_cast<int>(points.size()));
        for (int w = 0; w < count; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("sweep: point '" + values[i] + "' failed: " + errors[i]);
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << csv_header() << "\n";
    for (const SweepRow& r : rows) out << csv_row(r) << "\n";
}

// Per-packet event log: one line per transmission in start-time order.
inline void write_event_log(std::ostream& out, const SimResult& res) {
    for (const Transmission& tx : res.transmissions) {
        out << detail::fmt6(tx.start_s) << "," << tx.node_id << "," << tx.params.sf << ","
            << tx.params.bw_hz << "," << tx.params.tp_dbm << "," << detail::fmt6(tx.rx_power_dbm)
            << "," << to_string(tx.outcome) << "\n";
    }
}

// One run; metrics CSV (single row, sweep_value = seed) on metrics_out, plus
// an optional event log file.
inline void run_simulate(const Scenario& sc, std::uint64_t seed, std::ostream& metrics_out,
                         const std::string& events_path = "") {
    sc.validate();
    SimResult res = run(sc, seed);
    MetricsReport rep = compute_metrics(res);

    SweepRow row;
    row.sweep_value = std::to_string(seed);
    row.strategy = strategy_name(sc.strategy);
    row.seed_count = 1;
    row.der.mean = rep.overall_der;
    row.jain.mean = rep.jain;
    row.energy_j.mean = rep.total_energy_j;
    row.sf_der_mean = rep.sf_der;
    write_sweep_csv(metrics_out, {row});

    if (!events_path.empty()) {
        std::ofstream ev(events_path);
        if (!ev) throw std::runtime_error("simulate: cannot open event log '" + events_path + "'");
        write_event_log(ev, res);
    }
}

}  // namespace lorafair
