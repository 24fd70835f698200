// Copyright 2026 The tmpft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tmpft/cli.hpp"

namespace {

struct Flags {
    std::optional<std::string> scenario, dims, config, out;
    std::optional<double> p, beta, tolerance;
    std::optional<std::uint64_t> seed;
    bool emit_tuples = false;
    bool corrupt_reverse = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--scenario", f.scenario, "werner | counterexample | random | explicit");
    cmd->add_option("--p", f.p, "Werner / counterexample parameter");
    cmd->add_option("--beta", f.beta, "inverse temperature");
    cmd->add_option("--seed", f.seed, "seed for the random scenario");
    cmd->add_option("--dims", f.dims, "d_A,d_B,d_R for the random scenario");
    cmd->add_option("--config", f.config, "JSON configuration file");
    cmd->add_option("--tolerance", f.tolerance, "tolerance for equalities and bound slacks");
    cmd->add_option("--out", f.out, "output path (stdout when omitted)");
    cmd->add_flag("--emit-tuples", f.emit_tuples, "include per-tuple tables in the report");
    cmd->add_flag("--debug-corrupt-reverse", f.corrupt_reverse,
                  "perturb one reverse kernel entry (negative control)");
}

// Config file first, then command-line flags on top.
tmpft::cli::Config resolve(const Flags& f) {
    using tmpft::cli::ConfigError;
    tmpft::cli::Config cfg;
    if (f.config) cfg = tmpft::cli::load_config_file(*f.config);
    if (f.scenario) cfg.scenario = *f.scenario;
    if (f.p) cfg.p = *f.p;
    if (f.beta) {
        if (!(*f.beta > 0.0)) throw ConfigError("--beta", "must be positive");
        cfg.beta = *f.beta;
    }
    if (f.seed) cfg.seed = *f.seed;
    if (f.dims) tmpft::cli::detail::apply_dims(cfg, tmpft::cli::detail::parse_dims_string(*f.dims, "--dims"));
    if (f.tolerance) {
        if (!(*f.tolerance > 0.0)) throw ConfigError("--tolerance", "must be positive");
        cfg.tol.ft = cfg.tol.bound = *f.tolerance;
    }
    if (f.out) {
        cfg.report_path = *f.out;
        cfg.table_path.clear();
    }
    cfg.emit_tuples = cfg.emit_tuples || f.emit_tuples;
    cfg.corrupt_reverse = f.corrupt_reverse;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fluctuation theorems for correlated bipartite quantum systems"};
    app.require_subcommand(1);
    Flags run_flags, sweep_flags, verify_flags;
    auto* run = app.add_subcommand("run", "evaluate one scenario and write its report");
    auto* sweep = app.add_subcommand("sweep", "evaluate a scenario over a grid of p values");
    auto* verify = app.add_subcommand("verify", "run every invariant check and print pass/fail lines");
    add_flags(run, run_flags);
    add_flags(sweep, sweep_flags);
    add_flags(verify, verify_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tmpft::cli::kUsageError;
    }

    try {
        if (run->parsed()) return tmpft::cli::run_command(resolve(run_flags), std::cout, std::cerr);
        if (sweep->parsed()) return tmpft::cli::sweep_command(resolve(sweep_flags), std::cout, std::cerr);
        return tmpft::cli::verify_command(resolve(verify_flags), std::cout, std::cerr);
    } catch (const tmpft::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const tmpft::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return tmpft::cli::kUsageError;
}
