#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dualocp/cli/cli.hpp"

int main(int argc, char** argv)
{
    using namespace dualocp::cli;
    CLI::App app{"Dual-based solvers for box-constrained parabolic optimal control"};
    app.require_subcommand(1);

    std::string config;
    auto* solve = app.add_subcommand("solve", "Run the solves described in an INI config file");
    solve->add_option("config", config, "Config file (one [section] per run)")->required();

    int table_id = 1;
    std::string levels = "4";
    std::string algorithm = "dual";
    auto* table = app.add_subcommand("table", "Reproduce the Dual+FRCG / Dual+SSN rows of a results table");
    table->add_option("id", table_id, "Table id 1..7")->required();
    table->add_option("--levels", levels, "Level N or range LO-HI (h = dt = 2^-level); empty for header only");
    table->add_option("--algorithm", algorithm, "dual (default) or in-admm (reference-only)");

    SpectrumRequest spec;
    std::string gammas;
    auto* spectrum = app.add_subcommand("spectrum", "Dense spectrum of the preconditioned Schur complement");
    spectrum->add_option("--level", spec.level, "Mesh level (<= 2)");
    spectrum->add_option("--steps", spec.steps, "Time steps N in [2, 4]");
    spectrum->add_option("--gammas", gammas, "Comma-separated gamma list");
    spectrum->add_option("--pattern", spec.pattern, "Active set: all | none | random");
    spectrum->add_option("--seed", spec.seed, "Seed for the random active set");

    std::uint64_t seed = 7;
    auto* verify = app.add_subcommand("verify", "Run quick invariant checks");
    verify->add_option("--seed", seed, "Random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(config, std::cout, std::cerr);
        if (*table) return cmd_table(table_id, parse_level_range(levels), algorithm, std::cout, std::cerr);
        if (*spectrum) {
            if (!gammas.empty()) {
                spec.gammas.clear();
                std::istringstream is(gammas);
                std::string tok;
                while (std::getline(is, tok, ',')) spec.gammas.push_back(std::stod(tok));
            }
            return cmd_spectrum(spec, std::cout, std::cerr);
        }
        if (*verify) return cmd_verify(seed, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
