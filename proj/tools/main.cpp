// Command-line front end: run experiments, list presets, dump dictionaries.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cpstap/cpstap.hpp"

namespace {

int write_table(const cpstap::ResultTable& t, const std::string& out) {
    for (const auto& w : t.warnings) std::cerr << "warning: " << w << '\n';
    if (out.empty() || out == "-") {
        cpstap::write_csv(std::cout, t);
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw cpstap::ConfigError("cannot write output file '" + out + "'");
    cpstap::write_csv(f, t);
    if (!f) throw cpstap::ConfigError("failed while writing '" + out + "'");
    std::cerr << "wrote " << t.rows.size() << " rows to " << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coprime-array reduced-dimension sparse STAP experiments"};
    app.require_subcommand(1);

    std::string config_path, preset, out;
    std::uint64_t seed = 0;
    int trials = -1;
    auto* run = app.add_subcommand("run", "run an experiment and write its CSV table");
    run->add_option("--config", config_path, "YAML experiment file")->required()->check(CLI::ExistingFile);
    run->add_option("--preset", preset, "start from a named preset; keys in the file override it");
    auto* seed_opt = run->add_option("--seed", seed, "master RNG seed");
    run->add_option("--trials", trials, "Monte Carlo trials per sweep point")->check(CLI::NonNegativeNumber);
    run->add_option("--out", out, "output CSV path ('-' for stdout)");

    app.add_subcommand("list-presets", "print preset names and descriptions");

    std::string dump_config, dump_out;
    bool dump_atoms = false;
    auto* dump = app.add_subcommand("dump-dictionary", "write the dictionary of a config as CSV");
    dump->add_option("--config", dump_config, "YAML experiment file")->required()->check(CLI::ExistingFile);
    dump->add_option("--out", dump_out, "output CSV path")->required();
    dump->add_flag("--atoms", dump_atoms, "include atom entries as re/im column pairs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-presets")) {
            for (const auto& p : cpstap::presets()) std::cout << p.name << "\t" << p.description << '\n';
            return 0;
        }
        if (*run) {
            cpstap::ExperimentConfig cfg;
            if (preset.empty()) {
                cfg = cpstap::load_config(config_path);
            } else {
                cfg = cpstap::preset_config(preset);
                std::ifstream in(config_path);
                std::stringstream ss;
                ss << in.rdbuf();
                cpstap::apply_yaml(cfg, ss.str());
            }
            if (*seed_opt) cfg.seed = seed;
            if (trials >= 0) cfg.trials = trials;
            if (!out.empty()) cfg.output = out;
            return write_table(cpstap::run_experiment(cfg), cfg.output);
        }
        if (*dump) {
            const auto cfg = cpstap::load_config(dump_config);
            const auto s = cfg.resolved_scenario();
            const auto prior = cfg.resolved_prior(s);
            const auto vm = cpstap::build_virtual_maps(s.geom, s.m_pulses);
            const auto rd = cpstap::build_rd_maps(vm, s.target.doppler, cfg.m_bins);
            const auto dict = cpstap::build_dictionary(s, prior, vm, rd);
            for (const auto& w : dict.warnings) std::cerr << "warning: " << w << '\n';
            std::ofstream f(dump_out, std::ios::binary);
            if (!f) throw cpstap::ConfigError("cannot write output file '" + dump_out + "'");
            cpstap::write_dictionary_csv(f, dict, dump_atoms);
            std::cerr << "wrote " << dict.size() << " atoms (" << dict.atoms.rows() << " rows) to " << dump_out
                      << '\n';
            return 0;
        }
    } catch (const cpstap::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const cpstap::InvalidPriorError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const cpstap::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
