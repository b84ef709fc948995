// Experiment driver: Monte-Carlo NMSD curves, closed-form predictions and
// filter-bank dumps.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nsaf/nsaf.hpp"

namespace {

int cmd_run(nsaf::ExperimentConfig config, const std::string& csv, const std::string& svg,
            std::optional<std::size_t> runs, std::optional<std::uint64_t> seed, std::optional<std::size_t> threads) {
    if (!csv.empty()) config.out_csv = csv;
    if (!svg.empty()) config.out_svg = svg;
    if (runs) config.runs = *runs;
    if (seed) config.base_seed = *seed;
    if (threads) config.threads = *threads;
    config.validate();

    const auto result = nsaf::run_monte_carlo(config);
    const auto curves = nsaf::to_curves(result);
    if (config.out_csv.empty()) {
        nsaf::export_csv(std::cout, curves);
    } else {
        nsaf::export_csv(config.out_csv, curves);
    }
    if (!config.out_svg.empty()) {
        nsaf::emit_plot(config.out_svg, curves,
                        "NMSD, " + std::to_string(result.runs) + (result.runs == 1 ? " run" : " runs"));
    }

    std::cerr << "runs=" << result.runs << " iterations=" << result.iterations() << '\n';
    for (std::size_t a = 0; a < result.names.size(); ++a) {
        const auto db = result.nmsd_db(a);
        const auto end = result.change_iteration;
        std::cerr << "  " << result.names[a] << ": terminal NMSD " << nsaf::terminal_nmsd(db, end) << " dB";
        if (const auto k = nsaf::iterations_to_reach(db, -20.0)) std::cerr << ", reaches -20 dB at k=" << (*k + 1);
        std::cerr << '\n';
    }
    return 0;
}

int cmd_theory(const nsaf::ExperimentConfig& config, const std::string& csv) {
    const auto curves = nsaf::predict(config);
    if (csv.empty()) {
        nsaf::export_csv(std::cout, curves);
    } else {
        nsaf::export_csv(csv, curves);
    }
    return 0;
}

int cmd_banks(std::size_t n, std::size_t k, const std::string& out) {
    const auto bank = nsaf::make_default_bank(n, k);
    if (out.empty() || out == "-") {
        nsaf::write_bank(std::cout, bank);
    } else {
        nsaf::save_bank(out, bank);
    }
    std::cerr << "N=" << n << " L=" << bank.length()
              << " power-complementarity ripple=" << nsaf::power_complementarity_ripple(bank) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subband adaptive filtering experiments (NSAF / jointly optimized NSAF)"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_csv;
    std::string out_svg;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    auto* run = app.add_subcommand("run", "Run the Monte-Carlo experiment described by a config file");
    run->add_option("--config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out-csv", out_csv, "CSV output (overrides config; stdout if neither is set)");
    run->add_option("--out-svg", out_svg, "SVG plot output (overrides config)");
    run->add_option("--runs", runs, "Monte-Carlo runs (overrides config)");
    run->add_option("--seed", seed, "Base seed (overrides config)");
    run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    std::string theory_config;
    std::string theory_csv;
    auto* theory = app.add_subcommand("theory", "Emit the closed-form NMSD prediction as CSV");
    theory->add_option("--config", theory_config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    theory->add_option("--out-csv", theory_csv, "CSV output (stdout if omitted)");

    std::size_t bank_n = 8;
    std::size_t bank_k = 16;
    std::string bank_out;
    auto* banks = app.add_subcommand("banks", "Dump cosine-modulated analysis filter coefficients");
    banks->add_option("--n", bank_n, "Number of subbands")->required()->check(CLI::PositiveNumber);
    banks->add_option("--k", bank_k, "Prototype overlap factor (L = 2KN)")->check(CLI::PositiveNumber);
    banks->add_option("--out", bank_out, "Output file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(nsaf::load_config(config_path), out_csv, out_svg, runs, seed, threads);
        if (*theory) return cmd_theory(nsaf::load_config(theory_config), theory_csv);
        if (*banks) return cmd_banks(bank_n, bank_k, bank_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
