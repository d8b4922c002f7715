#include "nodalcert/errors.hpp"
#include "nodalcert/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

using namespace nodalcert;

namespace {

struct Flags {
    std::string config_path;
    std::string n;
    std::string ell;
    std::string m;
    std::string tasks;
    std::string out;
    bool rigorous = false;
    std::uint64_t seed = 0;
    double xi_radius = 0.0;
    double tol = 0.0;
};

void add_common(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--config", f.config_path, "JSON configuration; flags override it");
    cmd->add_option("--n", f.n, "ambient dimension(s), e.g. 3 or 3,4");
    cmd->add_option("--ell", f.ell, "ell value(s)");
    cmd->add_option("--m", f.m, "m value(s), e.g. 1..8");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--xi-radius", f.xi_radius, "rescaled mesh window half-width");
}

RunConfig build_config(CLI::App* cmd, const Flags& f)
{
    RunConfig c;
    if (!f.config_path.empty()) {
        std::ifstream is(f.config_path);
        if (!is) {
            throw ConfigError("cannot open " + f.config_path);
        }
        nlohmann::json j;
        try {
            is >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("invalid JSON in ") + f.config_path + ": " + e.what());
        }
        c = config_from_json(j, c);
    }
    auto given = [&](const char* name) { return cmd->get_option_no_throw(name) != nullptr &&
                                                cmd->get_option(name)->count() > 0; };
    if (given("--n")) {
        c.n = parse_range(f.n);
    }
    if (given("--ell")) {
        c.ell = parse_range(f.ell);
    }
    if (given("--m")) {
        c.m = parse_range(f.m);
    }
    if (given("--tasks")) {
        c.tasks = parse_tasks(f.tasks);
    }
    if (given("--out")) {
        c.out_dir = f.out;
    }
    if (given("--rigorous")) {
        c.rigorous = f.rigorous;
    }
    if (given("--seed")) {
        c.seed = f.seed;
    }
    if (given("--xi-radius")) {
        c.window.xi_radius = f.xi_radius;
    }
    if (given("--tol")) {
        c.tol.frequency = f.tol;
    }
    return c;
}

void print_summary(const VerificationReport& report)
{
    for (const auto& run : report.runs) {
        for (const auto& c : run.claims) {
            std::printf("(%d,%d,%d) %-28s %-12s measured=%-12.6g margin=%.3g%s%s\n", run.n, run.ell, run.m,
                        c.id.c_str(), to_string(c.status), c.measured, c.margin,
                        c.diagnostic.empty() ? "" : "  ", c.diagnostic.c_str());
        }
        for (const auto& note : run.notices) {
            std::printf("(%d,%d,%d) note: %s\n", run.n, run.ell, run.m, note.c_str());
        }
    }
}

int execute(const RunConfig& config)
{
    const auto report = run_verification(config);
    print_summary(report);
    write_report(report, config.out_dir);
    std::printf("wrote %s/report.json\n", config.out_dir.c_str());
    if (config.has(Task::figures)) {
        const auto files = emit_figures(report, config.out_dir);
        for (const auto& path : files.written) {
            std::printf("wrote %s/%s\n", config.out_dir.c_str(), path.c_str());
        }
        for (const auto& note : files.notices) {
            std::printf("note: %s\n", note.c_str());
        }
    }
    const int code = report.exit_code();
    std::printf("overall: %s\n", code == 0 ? "pass" : code == 1 ? "fail" : "inconclusive");
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Verification of the harmonic family u_{m,ell}"};
    app.require_subcommand(1);

    Flags verify_flags;
    auto* verify = app.add_subcommand("verify", "run verification tasks and write report.json");
    add_common(verify, verify_flags);
    verify->add_option("--tasks", verify_flags.tasks,
                       "comma list of frequency,regularity,holes,topology,regularized,figures or all");
    verify->add_flag("--rigorous", verify_flags.rigorous, "interval certification of regularity");
    verify->add_option("--seed", verify_flags.seed, "seed for ray directions");
    verify->add_option("--tol", verify_flags.tol, "tolerance on |N_1 - 2|");

    Flags figure_flags;
    auto* figures = app.add_subcommand("figures", "write OBJ, simplicial_text and CSV artifacts");
    add_common(figures, figure_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config;
        if (verify->parsed()) {
            config = build_config(verify, verify_flags);
            if (config.tasks.empty()) {
                config.tasks = parse_tasks("frequency,regularity,holes,topology");
            }
        } else {
            config = build_config(figures, figure_flags);
            config.tasks = {Task::figures};
        }
        validate(config);
        return execute(config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
