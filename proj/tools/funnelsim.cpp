// funnelsim command line: run closed-loop scenarios, check feasibility,
// and dump reference/boundary tables.
//
// Exit codes: 0 success, 1 usage/config error, 2 funnel violation (run) or
// failed initial membership (check), 3 trade-off condition not satisfied
// (check only; the simulation may still be run).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "funnelsim/feasibility.hpp"
#include "funnelsim/output.hpp"
#include "funnelsim/scenario.hpp"
#include "funnelsim/sim.hpp"

namespace fs = std::filesystem;
using namespace funnelsim;

namespace {

std::string resolve_output_dir(const Scenario& sc, const std::string& flagDir) {
    if (!flagDir.empty()) return flagDir;
    if (const char* env = std::getenv("FUNNELSIM_OUT")) {
        if (env[0] != '\0') return std::string(env) + "/" + sc.name;
    }
    return sc.outputDir;
}

int run_one(const Scenario& sc, const std::string& dir) {
    fs::create_directories(dir);
    const SimOutcome outcome = simulate(sc);

    {
        std::ofstream csv(fs::path(dir) / "trajectory.csv");
        if (!csv) {
            std::cerr << "error: cannot write " << dir << "/trajectory.csv\n";
            return 1;
        }
        write_trajectory_csv(outcome.record, csv);
    }
    if (sc.plots && outcome.record.size() > 1) {
        write_standard_plots(outcome.record, dir, sc.saturationLimit);
    }

    if (outcome.violation) {
        const FunnelViolation& v = *outcome.violation;
        std::cerr << FunnelViolationError::describe(v) << "\n";
        std::cerr << "trajectory up to the event written to " << dir
                  << "/trajectory.csv\n";
        return 2;
    }
    std::cout << sc.name << ": completed " << outcome.record.t.back()
              << " s, results in " << dir << "\n";
    return 0;
}

int cmd_run(const std::string& file, const std::string& flagDir, bool batch) {
    if (!batch) {
        const Scenario sc = load_scenario(file);
        return run_one(sc, resolve_output_dir(sc, flagDir));
    }
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(file)) {
        if (entry.path().extension() == ".scenario") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
        std::cerr << "error: no .scenario files in " << file << "\n";
        return 1;
    }
    int worst = 0;
    for (const fs::path& p : inputs) {
        const Scenario sc = load_scenario(p.string());
        const std::string base = flagDir.empty() ? resolve_output_dir(sc, "") : flagDir;
        const int rc = run_one(sc, (fs::path(base) / sc.name).string());
        worst = std::max(worst, rc);
    }
    return worst;
}

int cmd_check(const std::string& file, const std::string& flagDir) {
    const Scenario sc = load_scenario(file);
    const std::string dir = resolve_output_dir(sc, flagDir);

    const InitialMembership initial =
        check_initial(sc.initialState, sc.path, sc.schedulePtrs());
    const TradeoffReport tradeoff =
        check_tradeoff(sc.schedules[0], sc.schedules[1], sc.path, sc.vehicle.V,
                       sc.disturbance.bounds()[0], 1e-2, sc.horizon);

    std::printf("scenario: %s\n", sc.name.c_str());
    std::printf("initial funnel membership (phi_i(0)*|e_i(0)| < 1):\n");
    for (int i = 0; i < 4; ++i) {
        std::printf("  channel %d: %.6f  %s\n", i, initial.channels[i].margin,
                    initial.channels[i].ok ? "ok" : "VIOLATED");
    }
    std::printf("trade-off condition (reference rate vs funnel widths):\n");
    std::printf("  sup over [0, %.2f s] = %.6g at t = %.3f s (must be < 1): %s\n",
                sc.horizon, tradeoff.mu, tradeoff.muTime,
                tradeoff.satisfied ? "satisfied" : "NOT satisfied");

    fs::create_directories(dir);
    {
        std::ofstream csv(fs::path(dir) / "tradeoff_margin.csv");
        write_margin_csv(tradeoff, csv);
    }
    std::printf("margin series written to %s/tradeoff_margin.csv\n", dir.c_str());

    if (!initial.allOk) return 2;
    if (!tradeoff.satisfied) {
        std::printf("note: containment is not guaranteed, the simulation may still be run\n");
        return 3;
    }
    return 0;
}

int cmd_dump_reference(const std::string& file, std::string outFile) {
    const Scenario sc = load_scenario(file);
    if (outFile.empty()) outFile = sc.name + "_reference.csv";
    std::ofstream out(outFile);
    if (!out) {
        std::cerr << "error: cannot write " << outFile << "\n";
        return 1;
    }
    write_reference_csv(sc.path, sc.sim.outputStep, sc.horizon, out);
    std::cout << "reference table written to " << outFile << "\n";
    return 0;
}

int cmd_dump_boundary(const std::string& file, int channel, std::string outFile) {
    const Scenario sc = load_scenario(file);
    if (channel < 0 || channel > 3) {
        std::cerr << "error: channel must be 0..3\n";
        return 1;
    }
    if (outFile.empty()) outFile = sc.name + "_boundary" + std::to_string(channel) + ".csv";
    std::ofstream out(outFile);
    if (!out) {
        std::cerr << "error: cannot write " << outFile << "\n";
        return 1;
    }
    write_boundary_csv(sc.schedules[channel], sc.sim.outputStep, sc.horizon, out);
    std::cout << "boundary table written to " << outFile << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"funnel-control yaw-channel tracking simulator"};
    app.require_subcommand(1);

    std::string file, outDir, outFile;
    bool batch = false;
    int channel = 0;

    CLI::App* run = app.add_subcommand("run", "simulate a scenario and write CSV + plots");
    run->add_option("file", file, "scenario file (or directory with --batch)")->required();
    run->add_option("-o,--output", outDir, "output directory");
    run->add_flag("--batch", batch, "treat 'file' as a directory of .scenario files");

    CLI::App* check = app.add_subcommand("check", "evaluate feasibility conditions");
    check->add_option("file", file, "scenario file")->required();
    check->add_option("-o,--output", outDir, "output directory for the margin series");

    CLI::App* dumpRef = app.add_subcommand("dump-reference", "write the sampled reference as CSV");
    dumpRef->add_option("file", file, "scenario file")->required();
    dumpRef->add_option("-o,--output", outFile, "output CSV path");

    CLI::App* dumpBnd = app.add_subcommand("dump-boundary", "write a funnel boundary as CSV");
    dumpBnd->add_option("file", file, "scenario file")->required();
    dumpBnd->add_option("--channel", channel, "channel index 0..3")->required();
    dumpBnd->add_option("-o,--output", outFile, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(file, outDir, batch);
        if (check->parsed()) return cmd_check(file, outDir);
        if (dumpRef->parsed()) return cmd_dump_reference(file, outFile);
        if (dumpBnd->parsed()) return cmd_dump_boundary(file, channel, outFile);
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
