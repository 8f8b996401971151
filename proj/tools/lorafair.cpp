#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lorafair/lorafair.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
    std::vector<std::uint64_t> out;
    for (const std::string& s : lorafair::detail::split(list, ',')) {
        std::size_t pos = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("seeds: not an integer: '" + s + "'");
        }
        if (pos != s.size()) throw std::invalid_argument("seeds: trailing junk in '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("seeds: empty list");
    return out;
}

int cmd_ratios(int n, const std::string& deployed_spec) {
    auto deployed = lorafair::parse_deployed(deployed_spec);
    auto ratios = lorafair::fair_rate_ratios(deployed);
    auto counts = lorafair::ratios_to_counts(n, ratios);

    std::cout << "sf,bw_hz,cr,ratio,count\n";
    double ratio_sum = 0.0;
    long count_sum = 0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const auto& c = ratios[i].combo;
        std::cout << c.sf << "," << c.bw_hz << ",4/" << 4 + c.cr_n << ","
                  << lorafair::detail::fmt6(ratios[i].ratio) << "," << counts[i].count << "\n";
        ratio_sum += ratios[i].ratio;
        count_sum += counts[i].count;
    }
    std::cout << "total,,," << lorafair::detail::fmt6(ratio_sum) << "," << count_sum << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-gateway LoRa cell simulator with fair data-rate and power allocation"};
    app.require_subcommand(1);

    int ratios_n = 1000;
    std::string ratios_deployed = "7:125,8:125,9:125,10:125,11:125,12:125";
    CLI::App* ratios = app.add_subcommand("ratios", "Print fair allocation ratios and node counts");
    ratios->add_option("--n", ratios_n, "Cell size for the counts column")->check(CLI::PositiveNumber);
    ratios->add_option("--deployed", ratios_deployed, "Deployed set, sf:bw_khz[:cr_n],...");

    std::string sim_config, sim_events;
    std::uint64_t sim_seed = 0;
    CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario; metrics CSV on stdout");
    simulate->add_option("--config", sim_config, "Scenario config file")->required();
    simulate->add_option("--seed", sim_seed, "RNG seed")->required();
    simulate->add_option("--events", sim_events, "Write a per-packet event log to this path");

    std::string sw_config, sw_axis, sw_values, sw_seeds, sw_out;
    int sw_workers = lorafair::default_workers();
    CLI::App* sweep = app.add_subcommand("sweep", "Run a seeded sweep; CSV to --out");
    sweep->add_option("--config", sw_config, "Base scenario config file")->required();
    sweep->add_option("--axis", sw_axis, "Sweep axis: n_nodes, radius_m, distribution, strategy")
        ->required();
    sweep->add_option("--values", sw_values, "Comma-separated axis values")->required();
    sweep->add_option("--seeds", sw_seeds, "Comma-separated RNG seeds")->required();
    sweep->add_option("--out", sw_out, "Output CSV path")->required();
    sweep->add_option("--workers", sw_workers, "Parallel worker count (default: LORAFAIR_WORKERS or 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ratios)) return cmd_ratios(ratios_n, ratios_deployed);

        if (app.got_subcommand(simulate)) {
            lorafair::Scenario sc = lorafair::load_scenario(sim_config);
            lorafair::run_simulate(sc, sim_seed, std::cout, sim_events);
            return 0;
        }

        if (app.got_subcommand(sweep)) {
            lorafair::Scenario sc = lorafair::load_scenario(sw_config);
            auto rows = lorafair::run_sweep(sc, sw_axis, lorafair::detail::split(sw_values, ','),
                                            parse_seeds(sw_seeds), sw_workers);
            std::ofstream out(sw_out);
            if (!out) throw std::runtime_error("sweep: cannot open output '" + sw_out + "'");
            lorafair::write_sweep_csv(out, rows);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
