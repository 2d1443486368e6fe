#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aam/aggregation.hpp"
#include "aam/demand.hpp"
#include "aam/hlp.hpp"
#include "aam/llp.hpp"
#include "aam/network.hpp"
#include "aam/surrogate.hpp"

namespace aam {

struct ScenarioConfig {
    std::string network_file;
    std::string demand_preset_file;
    int historical_days = 3;
    int test_days = 3;
    std::vector<std::string> strategies = {"none", "type1", "type2"};

    double popup_rate = 0.1;
    int popup_replications = 25;
    std::vector<std::string> popup_strategies = {"none", "type1"};

    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    int jobs = 1;

    long max_nodes = 2000000;

    int hlp_candidates = 64;
    double delta_vm = 0.02;
    double eps_max = 30.0;
    int top_paths = 5;
    int top_vertiports = 3;

    std::vector<int> surrogate_hidden = {32, 16};
    double surrogate_lr = 0.01;
    int surrogate_epochs = 500;
    int surrogate_batch = 32;
    int surrogate_samples = 250;
    bool per_frame_surrogate = true;
    double aggregation_eps = 1e-6;

    static ScenarioConfig from_json(const std::string& text);
    static ScenarioConfig from_file(const std::string& filename);
    std::string to_json() const;
    void validate() const;
};

/// Outcome of one historical frame: baseline, surrogate quality at the chosen
/// tolls, and the pricing decision itself.
struct FrameDecisionRecord {
    int day = 0, frame = 0;
    int n_flights = 0;
    double baseline_objective = 0.0;  // phi at zero tolls
    int baseline_congestion = 0;
    double chosen_true_value = 0.0;      // phi at the chosen tolls
    double chosen_predicted_value = 0.0; // phi-hat at the chosen tolls
    double ratio = 0.0;                  // |phi-hat - phi| / phi
    int realized_congestion = 0;
    bool zero_toll_fallback = false;
    std::vector<double> toll_coords;
};

struct HistoricalRun {
    TollSpace space;
    std::vector<DaySchedule> schedules;                    // kept in memory only
    std::vector<std::vector<FrameDecisionRecord>> frames;  // [day][frame]
    std::vector<DayTolls> decision_history;                // [day][frame]
    std::vector<std::vector<double>> day_demand_dist;      // normalized histograms

    std::string to_json() const;
    static HistoricalRun from_json(const std::string& text);
};

struct TestDayRow {
    int day = 0;
    std::map<std::string, std::vector<int>> per_frame;  // strategy -> congestion per frame
    std::map<std::string, int> totals;
    std::map<std::string, double> reduction_pct;  // vs the "none" row
};

struct TestRun {
    StrategyBook type1;
    std::vector<StrategyBook> type2_per_day;
    std::vector<TestDayRow> days;

    std::string to_json() const;
    static TestRun from_json(const std::string& text);
};

struct PopupFrameStats {
    int day = 0, frame = 0;
    std::string strategy;
    int baseline = 0;  // congestion without pop-ups
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    int replications = 0;
    int excluded = 0;  // infeasible replications dropped
};

struct PopupRun {
    double rate = 0.0;
    std::vector<PopupFrameStats> frames;
    // strategy -> per-day medians of replication day totals
    std::map<std::string, std::vector<double>> day_median_totals;
    int excluded_total = 0;

    std::string to_json() const;
    static PopupRun from_json(const std::string& text);
};

HistoricalRun run_historical(const ScenarioConfig& cfg);
TestRun run_test_days(const ScenarioConfig& cfg, const HistoricalRun& hist);
PopupRun run_popup_study(const ScenarioConfig& cfg, const HistoricalRun& hist, const TestRun& test);

/// Assemble the final machine-readable report (deterministic for identical
/// inputs: no clocks, no machine state).
std::string make_report_json(const ScenarioConfig& cfg, const HistoricalRun& hist, const TestRun& test,
                             const PopupRun& popup);
std::string make_tables_csv(const HistoricalRun& hist, const TestRun& test);
std::string make_boxplot_csv(const PopupRun& popup);

/// Convenience: full pipeline, writing historical.json, aggregates.json,
/// test_results.json, popup_results.json, report.json, tables.csv and
/// boxplot_data.csv into cfg.out_dir.
void run_full_pipeline(const ScenarioConfig& cfg);

}  // namespace aam
