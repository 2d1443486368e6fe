#include "aam/aggregation.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace aam {

namespace {

/// Weighted sum of per-frame toll vectors across days.
TollVector blend(const std::vector<DayTolls>& history, std::size_t frame,
                 const std::vector<double>& weights) {
    TollVector out;
    std::set<std::string> paths, verts;
    for (const auto& day : history) {
        for (const auto& p : day[frame].tolled_paths) paths.insert(p);
        for (const auto& v : day[frame].tolled_vertiports) verts.insert(v);
    }
    out.tolled_paths.assign(paths.begin(), paths.end());
    out.tolled_vertiports.assign(verts.begin(), verts.end());

    for (const auto& pid : out.tolled_paths) {
        double acc = 0.0;
        for (std::size_t n = 0; n < history.size(); ++n)
            acc += weights[n] * history[n][frame].path_toll(pid);
        out.path_tolls[pid] = acc;
    }
    for (const auto& vid : out.tolled_vertiports) {
        std::size_t periods = 0;
        for (const auto& day : history) {
            auto it = day[frame].landing_tolls.find(vid);
            if (it != day[frame].landing_tolls.end()) periods = std::max(periods, it->second.size());
        }
        std::vector<double> acc(periods, 0.0);
        for (std::size_t n = 0; n < history.size(); ++n)
            for (std::size_t tau = 0; tau < periods; ++tau)
                acc[tau] += weights[n] * history[n][frame].landing_toll(vid, static_cast<int>(tau));
        out.landing_tolls[vid] = std::move(acc);
    }
    return out;
}

void check_history(const std::vector<DayTolls>& history) {
    if (history.empty()) throw ConfigError("aggregate: empty decision history");
    for (const auto& day : history)
        if (day.size() != history[0].size())
            throw ConfigError("aggregate: mismatched frame counts across days");
}

}  // namespace

StrategyBook aggregate_naive(const std::vector<DayTolls>& history) {
    check_history(history);
    const std::size_t n_days = history.size();
    std::vector<double> weights(n_days, 1.0 / static_cast<double>(n_days));

    StrategyBook book;
    book.weights = weights;
    for (std::size_t n = 0; n < n_days; ++n) book.contributing_days.push_back(static_cast<int>(n));
    for (std::size_t m = 0; m < history[0].size(); ++m) book.frames.push_back(blend(history, m, weights));
    return book;
}

double wasserstein_1d(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw ConfigError("wasserstein_1d: distributions differ in support size");
    double sp = 0.0, sq = 0.0;
    for (double v : p) sp += v;
    for (double v : q) sq += v;
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw ConfigError("wasserstein_1d: inputs must be normalized distributions");
    double cdf_p = 0.0, cdf_q = 0.0, dist = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        cdf_p += p[m];
        cdf_q += q[m];
        dist += std::abs(cdf_p - cdf_q);
    }
    return dist;
}

StrategyBook aggregate_weighted(const std::vector<DayTolls>& history,
                                const std::vector<std::vector<double>>& hist_demands,
                                const std::vector<double>& test_demand, double eps) {
    check_history(history);
    if (hist_demands.size() != history.size())
        throw ConfigError("aggregate_weighted: history and demand distributions misaligned");
    if (eps <= 0.0) throw ConfigError("aggregate_weighted: eps must be positive");

    std::vector<double> inv(history.size());
    double total = 0.0;
    for (std::size_t n = 0; n < history.size(); ++n) {
        inv[n] = 1.0 / (wasserstein_1d(test_demand, hist_demands[n]) + eps);
        total += inv[n];
    }
    std::vector<double> weights(history.size());
    for (std::size_t n = 0; n < history.size(); ++n) weights[n] = inv[n] / total;

    StrategyBook book;
    book.weights = weights;
    for (std::size_t n = 0; n < history.size(); ++n) book.contributing_days.push_back(static_cast<int>(n));
    for (std::size_t m = 0; m < history[0].size(); ++m) book.frames.push_back(blend(history, m, weights));
    return book;
}

std::string StrategyBook::to_json() const {
    nlohmann::json j;
    j["weights"] = weights;
    j["contributing_days"] = contributing_days;
    j["frames"] = nlohmann::json::array();
    for (const auto& f : frames) {
        nlohmann::json jf;
        jf["path_tolls"] = f.path_tolls;
        jf["landing_tolls"] = f.landing_tolls;
        jf["tolled_paths"] = f.tolled_paths;
        jf["tolled_vertiports"] = f.tolled_vertiports;
        j["frames"].push_back(jf);
    }
    return j.dump(2);
}

StrategyBook StrategyBook::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    StrategyBook book;
    book.weights = j.at("weights").get<std::vector<double>>();
    book.contributing_days = j.at("contributing_days").get<std::vector<int>>();
    for (const auto& jf : j.at("frames")) {
        TollVector tv;
        tv.path_tolls = jf.at("path_tolls").get<std::map<std::string, double>>();
        tv.landing_tolls = jf.at("landing_tolls").get<std::map<std::string, std::vector<double>>>();
        tv.tolled_paths = jf.at("tolled_paths").get<std::vector<std::string>>();
        tv.tolled_vertiports = jf.at("tolled_vertiports").get<std::vector<std::string>>();
        book.frames.push_back(std::move(tv));
    }
    return book;
}

}  // namespace aam
