#include "mcnet/io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace io = mcnet::io;

namespace {

// Reads a document, mapping unreadable inputs to the parse-error exit code.
bool read_input(const std::string& path, std::string& text) {
    try {
        text = io::load_input(path);
        return true;
    } catch (const std::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state load flow for coupled electricity, gas and heat networks"};
    app.require_subcommand(1);

    std::string input;
    auto* validate = app.add_subcommand("validate", "Count equations and unknowns, probe the Jacobian");
    validate->add_option("file", input, "Network document, or the name of a shipped fixture")->required();

    io::SolveOptions solve_opts;
    std::string format = "table";
    std::string guess_path;
    double tol = 0.0, damping = 0.0;
    int max_iter = 0;
    auto* solve = app.add_subcommand("solve", "Solve with Newton-Raphson and print the report");
    solve->add_option("file", input, "Network document, or the name of a shipped fixture")->required();
    auto* tol_opt = solve->add_option("--tol", tol, "Residual 2-norm tolerance");
    auto* iter_opt = solve->add_option("--max-iter", max_iter, "Iteration limit");
    auto* damp_opt = solve->add_option("--damping", damping, "Newton step scale in (0, 1]");
    solve->add_option("--guess", guess_path, "JSON file of initial values by slot label");
    solve->add_option("--format", format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));

    io::SweepOptions sweep_opts;
    std::string values_text, range_text;
    auto* sweep = app.add_subcommand("sweep", "Solve once per parameter value and print a CSV table");
    sweep->add_option("file", input, "Network document, or the name of a shipped fixture")->required();
    sweep->add_option("--param", sweep_opts.parameter, "Template key, boundary slot label or eta_h")->required();
    auto* values_opt = sweep->add_option("--values", values_text, "Comma-separated values");
    auto* range_opt = sweep->add_option("--range", range_text, "start:stop:count");
    values_opt->excludes(range_opt);
    sweep->add_option("--unit", sweep_opts.unit, "Unit of the values, e.g. MW");
    sweep->add_option("--jobs", sweep_opts.jobs, "Concurrent solves")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : io::kExitParse;
    }

    std::string text;
    if (!read_input(input, text)) return io::kExitParse;

    if (*validate) return io::cmd_validate(text, std::cout, std::cerr);

    if (*solve) {
        if (*tol_opt) solve_opts.tol = tol;
        if (*iter_opt) solve_opts.max_iter = max_iter;
        if (*damp_opt) solve_opts.damping = damping;
        solve_opts.format = *io::parse_format(format);
        if (!guess_path.empty()) {
            std::string guess;
            if (!read_input(guess_path, guess)) return io::kExitParse;
            solve_opts.guess_text = guess;
        }
        return io::cmd_solve(text, solve_opts, std::cout, std::cerr);
    }

    try {
        if (*range_opt) {
            sweep_opts.values = io::parse_range(range_text);
        } else if (*values_opt) {
            sweep_opts.values = io::parse_value_list(values_text);
        } else {
            std::cerr << "sweep needs --values or --range\n";
            return io::kExitParse;
        }
    } catch (const std::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return io::kExitParse;
    }
    return io::cmd_sweep(text, sweep_opts, std::cout, std::cerr);
}
