// Command-line driver: run experiments from config files, sweep a directory
// of configs, re-check persisted records, and print oracle reference values.
//
// Exit codes: 0 pass, 1 verdict failure, 2 config error, 3 blow-up.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hflow/config.hpp"
#include "hflow/errors.hpp"
#include "hflow/experiments.hpp"
#include "hflow/oracles.hpp"
#include "hflow/version.hpp"

namespace fs = std::filesystem;

namespace {

void print_verdicts(const std::vector<hflow::Verdict>& vs) {
    for (const auto& v : vs)
        std::printf("  [%s] %-28s %s\n", v.pass ? "PASS" : "FAIL", v.name.c_str(),
                    v.detail.c_str());
}

int exit_code_for(const hflow::RunRecord& rec) {
    if (rec.blew_up) return 3;
    return rec.all_pass() ? 0 : 1;
}

int cmd_run(const std::string& config_path) {
    hflow::ExperimentConfig cfg = hflow::ExperimentConfig::from_file(config_path);
    if (cfg.out_dir.empty())
        cfg.out_dir = (fs::path(hflow::output_root()) / cfg.config_hash).string();
    std::printf("running %s (hash %s) -> %s\n", to_string(cfg.kind).c_str(),
                cfg.config_hash.c_str(), cfg.out_dir.c_str());
    hflow::RunRecord rec = hflow::run(cfg);
    print_verdicts(rec.verdicts);
    std::printf("wall clock: %.1fs\n", rec.wall_clock_sec);
    return exit_code_for(rec);
}

int cmd_sweep(const std::string& dir) {
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".cfg") configs.push_back(e.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        std::fprintf(stderr, "no .cfg files under %s\n", dir.c_str());
        return 2;
    }
    std::vector<hflow::RunRecord> records;
    int worst = 0;
    for (const auto& p : configs) {
        hflow::ExperimentConfig cfg = hflow::ExperimentConfig::from_file(p.string());
        if (cfg.out_dir.empty())
            cfg.out_dir = (fs::path(hflow::output_root()) / cfg.config_hash).string();
        std::printf("== %s (%s)\n", p.filename().c_str(), to_string(cfg.kind).c_str());
        hflow::RunRecord rec = hflow::run(cfg);
        print_verdicts(rec.verdicts);
        worst = std::max(worst, exit_code_for(rec));
        records.push_back(std::move(rec));
    }
    int rc = hflow::report(records, (fs::path(hflow::output_root()) / "sweep").string());
    return std::max(worst, rc);
}

int cmd_check(const std::string& record_dir) {
    auto vs = hflow::check(record_dir);
    print_verdicts(vs);
    for (const auto& v : vs)
        if (!v.pass) return 1;
    return 0;
}

int cmd_oracle(const std::string& name) {
    std::vector<std::string> to_run;
    if (name == "all") to_run = hflow::oracle::names();
    else to_run.push_back(name);
    for (const auto& n : to_run) {
        auto r = hflow::oracle::run(n);
        std::printf("oracle %s: %s\n", r.name.c_str(), r.note.c_str());
        for (const auto& [k, v] : r.values) std::printf("  ref      %-28s %.17g\n", k.c_str(), v);
        for (const auto& [k, v] : r.measured) std::printf("  measured %-28s %.17g\n", k.c_str(), v);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ricci-DeTurck flow simulator and property harness"};
    app.set_version_flag("--version", hflow::kVersion);
    app.require_subcommand(1);

    std::string config_path, sweep_dir, record_dir, oracle_name;
    auto* run_cmd = app.add_subcommand("run", "run one experiment config");
    run_cmd->add_option("config", config_path, "config file")->required();
    auto* sweep_cmd = app.add_subcommand("sweep", "run every .cfg in a directory");
    sweep_cmd->add_option("dir", sweep_dir, "config directory")->required();
    auto* check_cmd = app.add_subcommand("check", "re-evaluate verdicts of a record");
    check_cmd->add_option("record", record_dir, "record directory")->required();
    auto* oracle_cmd = app.add_subcommand("oracle", "print oracle reference values");
    oracle_cmd->add_option("name", oracle_name, "oracle name or 'all'")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run_cmd->parsed()) return cmd_run(config_path);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_dir);
        if (check_cmd->parsed()) return cmd_check(record_dir);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_name);
    } catch (const hflow::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const hflow::BlowUpError& e) {
        std::fprintf(stderr, "blow-up: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
