#include "aam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aam/parallel.hpp"
#include "aam/rng.hpp"

namespace aam {

using nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ConfigError("cannot open file: " + filename);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& filename, const std::string& text) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + filename);
    out << text;
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = p * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
    const double frac = idx - lo;
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

ordered_json toll_vector_to_json(const TollVector& tv) {
    ordered_json j;
    j["path_tolls"] = tv.path_tolls;
    j["landing_tolls"] = tv.landing_tolls;
    j["tolled_paths"] = tv.tolled_paths;
    j["tolled_vertiports"] = tv.tolled_vertiports;
    return j;
}

TollVector toll_vector_from_json(const nlohmann::json& j) {
    TollVector tv;
    tv.path_tolls = j.at("path_tolls").get<std::map<std::string, double>>();
    tv.landing_tolls = j.at("landing_tolls").get<std::map<std::string, std::vector<double>>>();
    tv.tolled_paths = j.at("tolled_paths").get<std::vector<std::string>>();
    tv.tolled_vertiports = j.at("tolled_vertiports").get<std::vector<std::string>>();
    return tv;
}

/// Top tolled paths/vertiports by realized baseline usage, ties by id.
TollSpace make_restricted_space(const NetworkModel& net,
                                const std::vector<std::vector<FlightPlan>>& baseline_plans,
                                const std::vector<std::vector<FlightRequest>>& baseline_flights,
                                int top_paths, int top_vertiports, double eps_max) {
    std::map<std::string, int> path_use, vert_use;
    for (const auto& plans : baseline_plans)
        for (const auto& p : plans) ++path_use[p.chosen_path];
    for (const auto& flights : baseline_flights)
        for (const auto& f : flights) ++vert_use[f.destination];

    auto take_top = [](const std::map<std::string, int>& use, int k) {
        std::vector<std::pair<int, std::string>> ranked;
        for (const auto& [id, n] : use) ranked.emplace_back(-n, id);
        std::sort(ranked.begin(), ranked.end());
        std::vector<std::string> ids;
        for (int i = 0; i < k && i < static_cast<int>(ranked.size()); ++i)
            ids.push_back(ranked[i].second);
        std::sort(ids.begin(), ids.end());
        return ids;
    };

    TollSpace space;
    space.path_ids = take_top(path_use, top_paths);
    space.vertiport_ids = take_top(vert_use, top_vertiports);
    space.per_period_vertiport = false;
    space.horizon_periods = net.time().horizon_periods;
    space.eps_max = eps_max;
    if (space.path_ids.empty() || space.vertiport_ids.empty())
        throw SolveError("cannot restrict toll sets: no baseline traffic observed");
    return space;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (network_file.empty() || demand_preset_file.empty())
        throw ConfigError("scenario: network_file and demand_preset_file are required");
    if (!std::filesystem::exists(network_file))
        throw ConfigError("scenario: network file does not exist: " + network_file);
    if (!std::filesystem::exists(demand_preset_file))
        throw ConfigError("scenario: demand preset does not exist: " + demand_preset_file);
    if (historical_days < 1 || test_days < 1) throw ConfigError("scenario: need at least one day");
    if (popup_replications < 1) throw ConfigError("scenario: replications must be >= 1");
    if (popup_rate < 0.0 || popup_rate > 1.0) throw ConfigError("scenario: popup rate in [0,1]");
    for (const auto& s : strategies)
        if (s != "none" && s != "type1" && s != "type2")
            throw ConfigError("scenario: unknown strategy " + s);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ScenarioConfig c;
    c.network_file = j.at("network_file").get<std::string>();
    c.demand_preset_file = j.at("demand_preset_file").get<std::string>();
    c.historical_days = j.value("historical_days", c.historical_days);
    c.test_days = j.value("test_days", c.test_days);
    if (j.contains("strategies")) c.strategies = j["strategies"].get<std::vector<std::string>>();
    c.popup_rate = j.value("popup_rate", c.popup_rate);
    c.popup_replications = j.value("popup_replications", c.popup_replications);
    if (j.contains("popup_strategies"))
        c.popup_strategies = j["popup_strategies"].get<std::vector<std::string>>();
    c.master_seed = j.value("master_seed", c.master_seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.jobs = j.value("jobs", c.jobs);
    c.max_nodes = j.value("max_nodes", c.max_nodes);
    c.hlp_candidates = j.value("hlp_candidates", c.hlp_candidates);
    c.delta_vm = j.value("delta_vm", c.delta_vm);
    c.eps_max = j.value("eps_max", c.eps_max);
    c.top_paths = j.value("top_paths", c.top_paths);
    c.top_vertiports = j.value("top_vertiports", c.top_vertiports);
    if (j.contains("surrogate_hidden"))
        c.surrogate_hidden = j["surrogate_hidden"].get<std::vector<int>>();
    c.surrogate_lr = j.value("surrogate_lr", c.surrogate_lr);
    c.surrogate_epochs = j.value("surrogate_epochs", c.surrogate_epochs);
    c.surrogate_batch = j.value("surrogate_batch", c.surrogate_batch);
    c.surrogate_samples = j.value("surrogate_samples", c.surrogate_samples);
    c.per_frame_surrogate = j.value("per_frame_surrogate", c.per_frame_surrogate);
    c.aggregation_eps = j.value("aggregation_eps", c.aggregation_eps);
    return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& filename) {
    ScenarioConfig c = from_json(slurp(filename));
    // resolve data files relative to the config location
    const auto base = std::filesystem::path(filename).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && !std::filesystem::exists(p) && std::filesystem::exists(base / p))
            p = (base / p).string();
    };
    resolve(c.network_file);
    resolve(c.demand_preset_file);
    return c;
}

std::string ScenarioConfig::to_json() const {
    ordered_json j;
    j["network_file"] = network_file;
    j["demand_preset_file"] = demand_preset_file;
    j["historical_days"] = historical_days;
    j["test_days"] = test_days;
    j["strategies"] = strategies;
    j["popup_rate"] = popup_rate;
    j["popup_replications"] = popup_replications;
    j["popup_strategies"] = popup_strategies;
    j["master_seed"] = master_seed;
    j["out_dir"] = out_dir;
    j["jobs"] = jobs;
    j["max_nodes"] = max_nodes;
    j["hlp_candidates"] = hlp_candidates;
    j["delta_vm"] = delta_vm;
    j["eps_max"] = eps_max;
    j["top_paths"] = top_paths;
    j["top_vertiports"] = top_vertiports;
    j["surrogate_hidden"] = surrogate_hidden;
    j["surrogate_lr"] = surrogate_lr;
    j["surrogate_epochs"] = surrogate_epochs;
    j["surrogate_batch"] = surrogate_batch;
    j["surrogate_samples"] = surrogate_samples;
    j["per_frame_surrogate"] = per_frame_surrogate;
    j["aggregation_eps"] = aggregation_eps;
    return j.dump(2);
}

HistoricalRun run_historical(const ScenarioConfig& cfg) {
    cfg.validate();
    const NetworkModel net = load_network_file(cfg.network_file);
    const DemandPreset preset = DemandPreset::from_file(cfg.demand_preset_file);
    const int frames_per_day = net.time().llp_frames_per_day;
    const milp::SolveLimits limits{cfg.max_nodes, 1e18};

    HistoricalRun run;
    for (int day = 0; day < cfg.historical_days; ++day) {
        const DemandParams params = preset.resolve(net, day);
        run.schedules.push_back(
            sample_schedule(params, net, derive_seed(cfg.master_seed, "hist-day", day)));
    }

    // baselines (zero tolls) for every frame
    std::vector<std::vector<LlpResult>> baselines(cfg.historical_days);
    std::vector<std::vector<FlightPlan>> all_plans;
    std::vector<std::vector<FlightRequest>> all_flights;
    for (int day = 0; day < cfg.historical_days; ++day) {
        baselines[day].resize(frames_per_day);
        parallel_for(frames_per_day, cfg.jobs, [&](std::size_t m) {
            baselines[day][m] =
                solve_llp(net, run.schedules[day].frames[m], TollVector{}, {}, limits);
        });
        for (int m = 0; m < frames_per_day; ++m) {
            all_plans.push_back(baselines[day][m].plans);
            all_flights.push_back(run.schedules[day].frames[m]);
        }
    }

    run.space = make_restricted_space(net, all_plans, all_flights, cfg.top_paths, cfg.top_vertiports,
                                      cfg.eps_max);

    SurrogateConfig scfg;
    scfg.hidden = cfg.surrogate_hidden;
    scfg.learning_rate = cfg.surrogate_lr;
    scfg.epochs = cfg.surrogate_epochs;
    scfg.batch_size = cfg.surrogate_batch;
    scfg.train_size = cfg.surrogate_samples;
    scfg.eps_max = cfg.eps_max;

    // one surrogate per scenario unless per-frame training is requested
    TrainedSurrogate shared_surrogate;
    bool shared_ready = false;
    if (!cfg.per_frame_surrogate) {
        // round-robin the historical frames through the sample budget
        Dataset mixed;
        std::vector<std::pair<int, int>> contexts;
        for (int day = 0; day < cfg.historical_days; ++day)
            for (int m = 0; m < frames_per_day; ++m)
                if (!run.schedules[day].frames[m].empty()) contexts.emplace_back(day, m);
        if (!contexts.empty()) {
            std::vector<Dataset> parts(contexts.size());
            SurrogateConfig part_cfg = scfg;
            for (std::size_t c = 0; c < contexts.size(); ++c) {
                part_cfg.train_size =
                    scfg.train_size / static_cast<int>(contexts.size()) +
                    (static_cast<int>(c) < scfg.train_size % static_cast<int>(contexts.size()) ? 1 : 0);
                parts[c] = generate_dataset(
                    net, run.schedules[contexts[c].first].frames[contexts[c].second], run.space,
                    part_cfg, derive_seed(cfg.master_seed, "shared-dataset", c), limits, cfg.jobs);
            }
            for (auto& part : parts) {
                for (std::size_t i = 0; i < part.inputs.size(); ++i) {
                    mixed.inputs.push_back(std::move(part.inputs[i]));
                    mixed.targets.push_back(part.targets[i]);
                }
                mixed.skipped += part.skipped;
            }
            shared_surrogate = train(mixed, scfg, derive_seed(cfg.master_seed, "shared-train"));
            shared_ready = true;
        }
    }

    run.frames.resize(cfg.historical_days);
    run.decision_history.resize(cfg.historical_days);
    for (int day = 0; day < cfg.historical_days; ++day) {
        run.frames[day].resize(frames_per_day);
        run.decision_history[day].resize(frames_per_day);
        for (int m = 0; m < frames_per_day; ++m) {
            const auto& flights = run.schedules[day].frames[m];
            FrameDecisionRecord rec;
            rec.day = day;
            rec.frame = m;
            rec.n_flights = static_cast<int>(flights.size());
            rec.baseline_objective = baselines[day][m].objective;
            rec.baseline_congestion = occupancy(net, baselines[day][m].plans).total;

            if (flights.empty()) {
                rec.toll_coords.assign(run.space.dim(), 0.0);
                run.decision_history[day][m] = run.space.expand(rec.toll_coords);
                run.frames[day][m] = rec;
                continue;
            }

            TrainedSurrogate frame_surrogate;
            const TrainedSurrogate* surrogate = &shared_surrogate;
            if (cfg.per_frame_surrogate || !shared_ready) {
                Dataset data = generate_dataset(net, flights, run.space, scfg,
                                                derive_seed(cfg.master_seed, "dataset", day, m),
                                                limits, cfg.jobs);
                frame_surrogate = train(data, scfg, derive_seed(cfg.master_seed, "train", day, m));
                surrogate = &frame_surrogate;
            }

            HlpSearchConfig hcfg;
            hcfg.n_candidates = cfg.hlp_candidates;
            hcfg.delta_vm = cfg.delta_vm;
            hcfg.seed = derive_seed(cfg.master_seed, "hlp", day, m);
            hcfg.follower_limits = limits;
            hcfg.jobs = cfg.jobs;
            const TrainedSurrogate* sp = surrogate;
            HlpDecision decision = solve_hlp(
                net, flights, [sp](const std::vector<double>& coords) { return sp->predict(coords); },
                run.space, hcfg);

            // surrogate quality at the chosen tolls, against the exact optimum
            const LlpResult at_chosen = solve_llp(net, flights, decision.tolls, {}, limits);
            rec.chosen_true_value = at_chosen.objective;
            rec.chosen_predicted_value = sp->predict(decision.toll_coords);
            rec.ratio = at_chosen.objective > 0.0
                            ? approx_ratio(rec.chosen_predicted_value, at_chosen.objective)
                            : 0.0;
            rec.realized_congestion = decision.realized_congestion;
            rec.zero_toll_fallback = decision.zero_toll_fallback;
            rec.toll_coords = decision.toll_coords;
            run.decision_history[day][m] = decision.tolls;
            run.frames[day][m] = rec;
        }
    }

    // realized demand distributions per historical day
    for (int day = 0; day < cfg.historical_days; ++day) {
        const auto& hist = run.schedules[day].demand_histogram;
        int total = 0;
        for (int h : hist) total += h;
        run.day_demand_dist.push_back(total > 0
                                          ? normalize_demand(hist)
                                          : std::vector<double>(hist.size(), 1.0 / hist.size()));
    }
    return run;
}

TestRun run_test_days(const ScenarioConfig& cfg, const HistoricalRun& hist) {
    cfg.validate();
    const NetworkModel net = load_network_file(cfg.network_file);
    const DemandPreset preset = DemandPreset::from_file(cfg.demand_preset_file);
    const int frames_per_day = net.time().llp_frames_per_day;
    const milp::SolveLimits limits{cfg.max_nodes, 1e18};

    TestRun out;
    out.type1 = aggregate_naive(hist.decision_history);

    for (int day = 0; day < cfg.test_days; ++day) {
        const DemandParams params = preset.resolve(net, day);
        const DaySchedule schedule =
            sample_schedule(params, net, derive_seed(cfg.master_seed, "test-day", day));

        int total = 0;
        for (int h : schedule.demand_histogram) total += h;
        const std::vector<double> test_dist =
            total > 0 ? normalize_demand(schedule.demand_histogram)
                      : std::vector<double>(schedule.demand_histogram.size(),
                                            1.0 / schedule.demand_histogram.size());
        out.type2_per_day.push_back(
            aggregate_weighted(hist.decision_history, hist.day_demand_dist, test_dist,
                               cfg.aggregation_eps));

        TestDayRow row;
        row.day = day;
        for (const auto& strategy : cfg.strategies) {
            std::vector<int> per_frame(frames_per_day, 0);
            parallel_for(frames_per_day, cfg.jobs, [&](std::size_t m) {
                TollVector tolls;
                if (strategy == "type1") tolls = out.type1.frames[m];
                if (strategy == "type2") tolls = out.type2_per_day[day].frames[m];
                const LlpResult res = solve_llp(net, schedule.frames[m], tolls, {}, limits);
                per_frame[m] = occupancy(net, res.plans).total;
            });
            int day_total = 0;
            for (int v : per_frame) day_total += v;
            row.per_frame[strategy] = std::move(per_frame);
            row.totals[strategy] = day_total;
        }
        if (row.totals.count("none")) {
            const int none = row.totals["none"];
            for (const auto& strategy : cfg.strategies) {
                row.reduction_pct[strategy] =
                    none > 0
                        ? (none - row.totals[strategy]) / static_cast<double>(none) * 100.0
                        : 0.0;
            }
        }
        out.days.push_back(std::move(row));
    }
    return out;
}

PopupRun run_popup_study(const ScenarioConfig& cfg, const HistoricalRun& hist, const TestRun& test) {
    (void)hist;  // schedules are re-derived from seeds; kept for interface symmetry
    cfg.validate();
    const NetworkModel net = load_network_file(cfg.network_file);
    const DemandPreset preset = DemandPreset::from_file(cfg.demand_preset_file);
    const int frames_per_day = net.time().llp_frames_per_day;
    const int reps = cfg.popup_replications;
    const milp::SolveLimits limits{cfg.max_nodes, 1e18};

    PopupRun out;
    out.rate = cfg.popup_rate;

    for (int day = 0; day < cfg.test_days; ++day) {
        const DemandParams params = preset.resolve(net, day);
        const DaySchedule schedule =
            sample_schedule(params, net, derive_seed(cfg.master_seed, "test-day", day));

        // pop-up draws are shared across strategies: same seeds, same flights
        std::vector<std::vector<std::vector<FlightRequest>>> popups(frames_per_day);
        for (int m = 0; m < frames_per_day; ++m) {
            popups[m].resize(reps);
            for (int r = 0; r < reps; ++r)
                popups[m][r] = sample_popups(schedule, net, cfg.popup_rate, m,
                                             derive_seed(cfg.master_seed, "popup", day, m, r));
        }

        for (const auto& strategy : cfg.popup_strategies) {
            // congestion per (frame, rep); -1 marks an infeasible replication
            std::vector<std::vector<int>> totals(frames_per_day, std::vector<int>(reps, -1));
            std::vector<int> baseline(frames_per_day, 0);
            parallel_for(static_cast<std::size_t>(frames_per_day) * reps, cfg.jobs, [&](std::size_t k) {
                const int m = static_cast<int>(k / reps);
                const int r = static_cast<int>(k % reps);
                TollVector tolls;
                if (strategy == "type1") tolls = test.type1.frames[m];
                if (strategy == "type2") tolls = test.type2_per_day[day].frames[m];
                try {
                    const LlpResult res =
                        solve_llp(net, schedule.frames[m], tolls, popups[m][r], limits);
                    totals[m][r] = occupancy(net, res.plans).total;
                } catch (const SolveError&) {
                    totals[m][r] = -1;
                }
            });
            parallel_for(frames_per_day, cfg.jobs, [&](std::size_t m) {
                TollVector tolls;
                if (strategy == "type1") tolls = test.type1.frames[m];
                if (strategy == "type2") tolls = test.type2_per_day[day].frames[m];
                const LlpResult res = solve_llp(net, schedule.frames[m], tolls, {}, limits);
                baseline[m] = occupancy(net, res.plans).total;
            });

            for (int m = 0; m < frames_per_day; ++m) {
                PopupFrameStats st;
                st.day = day;
                st.frame = m;
                st.strategy = strategy;
                st.baseline = baseline[m];
                std::vector<double> vals;
                for (int r = 0; r < reps; ++r)
                    if (totals[m][r] >= 0)
                        vals.push_back(totals[m][r]);
                    else
                        ++st.excluded;
                st.replications = static_cast<int>(vals.size());
                if (!vals.empty()) {
                    st.min = quantile(vals, 0.0);
                    st.q1 = quantile(vals, 0.25);
                    st.median = quantile(vals, 0.5);
                    st.q3 = quantile(vals, 0.75);
                    st.max = quantile(vals, 1.0);
                }
                out.excluded_total += st.excluded;
                out.frames.push_back(std::move(st));
            }

            // day totals per replication, over replications feasible in every frame
            std::vector<double> day_totals;
            for (int r = 0; r < reps; ++r) {
                int sum = 0;
                bool ok = true;
                for (int m = 0; m < frames_per_day; ++m) {
                    if (totals[m][r] < 0) {
                        ok = false;
                        break;
                    }
                    sum += totals[m][r];
                }
                if (ok) day_totals.push_back(sum);
            }
            out.day_median_totals[strategy].push_back(quantile(day_totals, 0.5));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// serialization

std::string HistoricalRun::to_json() const {
    ordered_json j;
    j["space"] = {{"path_ids", space.path_ids},
                  {"vertiport_ids", space.vertiport_ids},
                  {"per_period_vertiport", space.per_period_vertiport},
                  {"horizon_periods", space.horizon_periods},
                  {"eps_max", space.eps_max}};
    j["frames"] = ordered_json::array();
    for (const auto& day : frames)
        for (const auto& rec : day) {
            ordered_json r;
            r["day"] = rec.day;
            r["frame"] = rec.frame;
            r["n_flights"] = rec.n_flights;
            r["baseline_objective"] = rec.baseline_objective;
            r["baseline_congestion"] = rec.baseline_congestion;
            r["chosen_true_value"] = rec.chosen_true_value;
            r["chosen_predicted_value"] = rec.chosen_predicted_value;
            r["ratio"] = rec.ratio;
            r["realized_congestion"] = rec.realized_congestion;
            r["zero_toll_fallback"] = rec.zero_toll_fallback;
            r["toll_coords"] = rec.toll_coords;
            j["frames"].push_back(r);
        }
    j["decision_history"] = ordered_json::array();
    for (const auto& day : decision_history) {
        ordered_json jd = ordered_json::array();
        for (const auto& tv : day) jd.push_back(toll_vector_to_json(tv));
        j["decision_history"].push_back(jd);
    }
    j["day_demand_dist"] = day_demand_dist;
    return j.dump(2);
}

HistoricalRun HistoricalRun::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    HistoricalRun run;
    run.space.path_ids = j.at("space").at("path_ids").get<std::vector<std::string>>();
    run.space.vertiport_ids = j.at("space").at("vertiport_ids").get<std::vector<std::string>>();
    run.space.per_period_vertiport = j.at("space").at("per_period_vertiport").get<bool>();
    run.space.horizon_periods = j.at("space").at("horizon_periods").get<int>();
    run.space.eps_max = j.at("space").at("eps_max").get<double>();
    for (const auto& r : j.at("frames")) {
        FrameDecisionRecord rec;
        rec.day = r.at("day").get<int>();
        rec.frame = r.at("frame").get<int>();
        rec.n_flights = r.at("n_flights").get<int>();
        rec.baseline_objective = r.at("baseline_objective").get<double>();
        rec.baseline_congestion = r.at("baseline_congestion").get<int>();
        rec.chosen_true_value = r.at("chosen_true_value").get<double>();
        rec.chosen_predicted_value = r.at("chosen_predicted_value").get<double>();
        rec.ratio = r.at("ratio").get<double>();
        rec.realized_congestion = r.at("realized_congestion").get<int>();
        rec.zero_toll_fallback = r.at("zero_toll_fallback").get<bool>();
        rec.toll_coords = r.at("toll_coords").get<std::vector<double>>();
        if (rec.day >= static_cast<int>(run.frames.size())) run.frames.resize(rec.day + 1);
        run.frames[rec.day].push_back(rec);
    }
    for (const auto& jd : j.at("decision_history")) {
        DayTolls day;
        for (const auto& jt : jd) day.push_back(toll_vector_from_json(jt));
        run.decision_history.push_back(std::move(day));
    }
    run.day_demand_dist = j.at("day_demand_dist").get<std::vector<std::vector<double>>>();
    return run;
}

std::string TestRun::to_json() const {
    ordered_json j;
    j["type1"] = ordered_json::parse(type1.to_json());
    j["type2_per_day"] = ordered_json::array();
    for (const auto& b : type2_per_day) j["type2_per_day"].push_back(ordered_json::parse(b.to_json()));
    j["days"] = ordered_json::array();
    for (const auto& row : days) {
        ordered_json r;
        r["day"] = row.day;
        r["per_frame"] = row.per_frame;
        r["totals"] = row.totals;
        r["reduction_pct"] = row.reduction_pct;
        j["days"].push_back(r);
    }
    return j.dump(2);
}

TestRun TestRun::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TestRun out;
    out.type1 = StrategyBook::from_json(j.at("type1").dump());
    for (const auto& b : j.at("type2_per_day"))
        out.type2_per_day.push_back(StrategyBook::from_json(b.dump()));
    for (const auto& r : j.at("days")) {
        TestDayRow row;
        row.day = r.at("day").get<int>();
        row.per_frame = r.at("per_frame").get<std::map<std::string, std::vector<int>>>();
        row.totals = r.at("totals").get<std::map<std::string, int>>();
        row.reduction_pct = r.at("reduction_pct").get<std::map<std::string, double>>();
        out.days.push_back(std::move(row));
    }
    return out;
}

std::string PopupRun::to_json() const {
    ordered_json j;
    j["rate"] = rate;
    j["excluded_total"] = excluded_total;
    j["day_median_totals"] = day_median_totals;
    j["frames"] = ordered_json::array();
    for (const auto& st : frames) {
        ordered_json r;
        r["day"] = st.day;
        r["frame"] = st.frame;
        r["strategy"] = st.strategy;
        r["baseline"] = st.baseline;
        r["min"] = st.min;
        r["q1"] = st.q1;
        r["median"] = st.median;
        r["q3"] = st.q3;
        r["max"] = st.max;
        r["replications"] = st.replications;
        r["excluded"] = st.excluded;
        j["frames"].push_back(r);
    }
    return j.dump(2);
}

PopupRun PopupRun::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PopupRun out;
    out.rate = j.at("rate").get<double>();
    out.excluded_total = j.at("excluded_total").get<int>();
    out.day_median_totals = j.at("day_median_totals").get<std::map<std::string, std::vector<double>>>();
    for (const auto& r : j.at("frames")) {
        PopupFrameStats st;
        st.day = r.at("day").get<int>();
        st.frame = r.at("frame").get<int>();
        st.strategy = r.at("strategy").get<std::string>();
        st.baseline = r.at("baseline").get<int>();
        st.min = r.at("min").get<double>();
        st.q1 = r.at("q1").get<double>();
        st.median = r.at("median").get<double>();
        st.q3 = r.at("q3").get<double>();
        st.max = r.at("max").get<double>();
        st.replications = r.at("replications").get<int>();
        st.excluded = r.at("excluded").get<int>();
        out.frames.push_back(std::move(st));
    }
    return out;
}

std::string make_report_json(const ScenarioConfig& cfg, const HistoricalRun& hist, const TestRun& test,
                             const PopupRun& popup) {
    ordered_json j;
    j["config"] = ordered_json::parse(cfg.to_json());

    ordered_json approx = ordered_json::array();
    for (const auto& day : hist.frames)
        for (const auto& rec : day) {
            if (rec.n_flights == 0) continue;
            approx.push_back({{"day", rec.day},
                              {"frame", rec.frame},
                              {"objective", rec.chosen_true_value},
                              {"approx_value", rec.chosen_predicted_value},
                              {"approx_ratio_pct", rec.ratio * 100.0},
                              {"baseline_congestion", rec.baseline_congestion},
                              {"hlp_congestion", rec.realized_congestion},
                              {"fallback", rec.zero_toll_fallback}});
        }
    j["approx_table"] = approx;

    ordered_json days = ordered_json::array();
    for (const auto& row : test.days) {
        ordered_json r;
        r["day"] = row.day;
        r["totals"] = row.totals;
        r["reduction_pct"] = row.reduction_pct;
        r["per_frame"] = row.per_frame;
        days.push_back(r);
    }
    j["test_days"] = days;
    j["popup"] = ordered_json::parse(popup.to_json());
    return j.dump(2) + "\n";
}

std::string make_tables_csv(const HistoricalRun& hist, const TestRun& test) {
    std::ostringstream out;
    out << "table,day,frame,objective,approx_value,approx_ratio_pct\n";
    for (const auto& day : hist.frames)
        for (const auto& rec : day) {
            if (rec.n_flights == 0) continue;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%.2f", rec.chosen_true_value,
                          rec.chosen_predicted_value, rec.ratio * 100.0);
            out << "approx," << rec.day << "," << rec.frame << "," << buf << "\n";
        }
    out << "table,day,no_strategy,type1,type1_reduction_pct,type2,type2_reduction_pct\n";
    for (const auto& row : test.days) {
        auto total = [&](const std::string& s) {
            auto it = row.totals.find(s);
            return it == row.totals.end() ? -1 : it->second;
        };
        auto red = [&](const std::string& s) {
            auto it = row.reduction_pct.find(s);
            return it == row.reduction_pct.end() ? 0.0 : it->second;
        };
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.1f", red("type1"));
        std::string red1 = buf;
        std::snprintf(buf, sizeof(buf), "%.1f", red("type2"));
        std::string red2 = buf;
        out << "congestion," << row.day << "," << total("none") << "," << total("type1") << "," << red1
            << "," << total("type2") << "," << red2 << "\n";
    }
    return out.str();
}

std::string make_boxplot_csv(const PopupRun& popup) {
    std::ostringstream out;
    out << "day,frame,strategy,baseline,min,q1,median,q3,max,replications,excluded\n";
    for (const auto& st : popup.frames) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f,%.1f,%.1f,%.1f", st.min, st.q1, st.median, st.q3,
                      st.max);
        out << st.day << "," << st.frame << "," << st.strategy << "," << st.baseline << "," << buf << ","
            << st.replications << "," << st.excluded << "\n";
    }
    return out.str();
}

void run_full_pipeline(const ScenarioConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(cfg.out_dir) / name).string();
    };
    HistoricalRun hist = run_historical(cfg);
    spit(out("historical.json"), hist.to_json());
    TestRun test = run_test_days(cfg, hist);
    spit(out("aggregates.json"), test.type1.to_json());
    spit(out("test_results.json"), test.to_json());
    PopupRun popup = run_popup_study(cfg, hist, test);
    spit(out("popup_results.json"), popup.to_json());
    spit(out("report.json"), make_report_json(cfg, hist, test, popup));
    spit(out("tables.csv"), make_tables_csv(hist, test));
    spit(out("boxplot_data.csv"), make_boxplot_csv(popup));
}

}  // namespace aam
