#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aam/harness.hpp"

namespace {

std::string slurp(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw aam::ConfigError("cannot open file: " + filename);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& filename, const std::string& text) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw aam::ConfigError("cannot write file: " + filename);
    out << text;
}

struct CommonOpts {
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    double popup_rate = -1.0;
    int reps = 0;
    std::string strategy = "all";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "scenario config JSON")->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "master seed override")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--jobs", o.jobs, "parallel workers");
    cmd->add_option("--strategy", o.strategy, "none|type1|type2|all")
        ->check(CLI::IsMember({"none", "type1", "type2", "all"}));
    cmd->add_option("--popup-rate", o.popup_rate, "pop-up probability per OD pair");
    cmd->add_option("--reps", o.reps, "pop-up replications per frame");
}

aam::ScenarioConfig load_config(const CommonOpts& o) {
    aam::ScenarioConfig cfg = aam::ScenarioConfig::from_file(o.config);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.seed_set) cfg.master_seed = o.seed;
    if (o.jobs > 0) cfg.jobs = o.jobs;
    if (o.popup_rate >= 0.0) cfg.popup_rate = o.popup_rate;
    if (o.reps > 0) cfg.popup_replications = o.reps;
    if (o.strategy != "all") {
        cfg.strategies = {"none"};
        if (o.strategy != "none") cfg.strategies.push_back(o.strategy);
    }
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const aam::ScenarioConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aamsim: bi-level congestion management simulator for AAM networks"};
    app.require_subcommand(1);

    CommonOpts hist_o, agg_o, test_o, pop_o, rep_o;
    CLI::App* hist = app.add_subcommand("simulate-historical",
                                        "sample historical days, train surrogates, collect pricing "
                                        "decisions");
    add_common(hist, hist_o);
    CLI::App* agg = app.add_subcommand("aggregate", "build the type 1 strategy book from history");
    add_common(agg, agg_o);
    CLI::App* test = app.add_subcommand("run-tests", "deploy strategies on the test days");
    add_common(test, test_o);
    CLI::App* pop = app.add_subcommand("popup-study", "Monte Carlo pop-up stress test");
    add_common(pop, pop_o);
    CLI::App* rep = app.add_subcommand("report", "assemble report.json, tables.csv, boxplot_data.csv");
    add_common(rep, rep_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (hist->parsed()) {
            aam::ScenarioConfig cfg = load_config(hist_o);
            aam::HistoricalRun run = aam::run_historical(cfg);
            spit(out_path(cfg, "historical.json"), run.to_json());
            std::cout << "historical run complete: " << cfg.historical_days << " day(s), wrote "
                      << out_path(cfg, "historical.json") << "\n";
        } else if (agg->parsed()) {
            aam::ScenarioConfig cfg = load_config(agg_o);
            aam::HistoricalRun run =
                aam::HistoricalRun::from_json(slurp(out_path(cfg, "historical.json")));
            aam::StrategyBook type1 = aam::aggregate_naive(run.decision_history);
            spit(out_path(cfg, "aggregates.json"), type1.to_json());
            std::cout << "wrote " << out_path(cfg, "aggregates.json") << "\n";
        } else if (test->parsed()) {
            aam::ScenarioConfig cfg = load_config(test_o);
            aam::HistoricalRun run =
                aam::HistoricalRun::from_json(slurp(out_path(cfg, "historical.json")));
            aam::TestRun results = aam::run_test_days(cfg, run);
            spit(out_path(cfg, "test_results.json"), results.to_json());
            for (const auto& row : results.days) {
                std::cout << "day " << row.day << ":";
                for (const auto& [strategy, total] : row.totals) {
                    std::cout << " " << strategy << "=" << total;
                    if (strategy != "none" && row.reduction_pct.count(strategy)) {
                        char buf[32];
                        std::snprintf(buf, sizeof(buf), " (%.1f%%)",
                                      row.reduction_pct.at(strategy));
                        std::cout << buf;
                    }
                }
                std::cout << "\n";
            }
        } else if (pop->parsed()) {
            aam::ScenarioConfig cfg = load_config(pop_o);
            aam::HistoricalRun run =
                aam::HistoricalRun::from_json(slurp(out_path(cfg, "historical.json")));
            aam::TestRun results = aam::TestRun::from_json(slurp(out_path(cfg, "test_results.json")));
            aam::PopupRun popup = aam::run_popup_study(cfg, run, results);
            spit(out_path(cfg, "popup_results.json"), popup.to_json());
            std::cout << "pop-up study complete (" << popup.frames.size() << " frame rows, "
                      << popup.excluded_total << " infeasible replication(s) excluded)\n";
        } else if (rep->parsed()) {
            aam::ScenarioConfig cfg = load_config(rep_o);
            aam::HistoricalRun run =
                aam::HistoricalRun::from_json(slurp(out_path(cfg, "historical.json")));
            aam::TestRun results = aam::TestRun::from_json(slurp(out_path(cfg, "test_results.json")));
            aam::PopupRun popup = aam::PopupRun::from_json(slurp(out_path(cfg, "popup_results.json")));
            spit(out_path(cfg, "report.json"), aam::make_report_json(cfg, run, results, popup));
            spit(out_path(cfg, "tables.csv"), aam::make_tables_csv(run, results));
            spit(out_path(cfg, "boxplot_data.csv"), aam::make_boxplot_csv(popup));
            std::cout << "wrote " << out_path(cfg, "report.json") << ", tables.csv, boxplot_data.csv\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
