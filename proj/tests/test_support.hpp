#pragma once

// Shared fixtures and oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "aam/demand.hpp"
#include "aam/milp.hpp"
#include "aam/network.hpp"
#include "aam/rng.hpp"

namespace testsupport {

/// Small two-vertiport network: two paths A->B (fast/slow through different
/// sectors) and one back-path B->A. All times are multiples of 10 s so grid
/// oracles are exact.
inline aam::NetworkModel make_mini_network(int horizon_periods = 3, int period_seconds = 600,
                                           double dep_per_hour = 30.0, double arr_per_hour = 30.0,
                                           int cap_s1 = 2, int cap_s2 = 10) {
    aam::TimeGrid grid;
    grid.horizon_periods = horizon_periods;
    grid.period_seconds = period_seconds;
    grid.llp_frames_per_day = 4;
    grid.days = 1;

    std::vector<aam::Vertiport> verts = {
        {"A", dep_per_hour, arr_per_hour, std::vector<double>(horizon_periods, 2.0), true},
        {"B", dep_per_hour, arr_per_hour, std::vector<double>(horizon_periods, 2.0), false},
    };
    std::vector<aam::AirspaceSector> sectors = {{"S1", cap_s1}, {"S2", cap_s2}};
    std::vector<aam::Path> paths = {
        {"AB1", "A", "B", 300.0, 10.0, {{"S1", 0.0}}},
        {"AB2", "A", "B", 420.0, 20.0, {{"S2", 0.0}}},
        {"BA1", "B", "A", 300.0, 10.0, {{"S2", 0.0}}},
    };
    return aam::NetworkModel(grid, verts, paths, sectors);
}

inline aam::FlightRequest make_flight(const std::string& id, const std::string& o, const std::string& d,
                                      double dep, double delay_cost = 0.05) {
    aam::FlightRequest f;
    f.id = id;
    f.origin = o;
    f.destination = d;
    f.scheduled_dep = dep;
    f.delay_cost = delay_cost;
    f.psu_tag = "psu-0";
    f.priority = false;
    return f;
}

// ---------------------------------------------------------------------------
// random integer programs + exhaustive enumeration oracle

struct RandomMilp {
    aam::milp::MilpModel model;
    std::vector<int> ranges;  // inclusive upper bound per variable (lower 0)
};

inline RandomMilp make_random_milp(aam::Rng& rng, int max_vars = 8, int max_rows = 12) {
    RandomMilp out;
    const int n = 2 + static_cast<int>(rng.below(max_vars - 1));
    std::vector<int> anchor;  // a known assignment most instances stay feasible at
    for (int j = 0; j < n; ++j) {
        const int range = rng.uniform() < 0.7 ? 1 : 1 + static_cast<int>(rng.below(3));
        const double obj = static_cast<double>(static_cast<int>(rng.below(19)) - 9);
        out.model.add_var("x" + std::to_string(j), 0.0, range, obj, true);
        out.ranges.push_back(range);
        anchor.push_back(static_cast<int>(rng.below(range + 1)));
    }
    const bool anchored = rng.uniform() < 0.75;
    const int m = 1 + static_cast<int>(rng.below(max_rows));
    for (int i = 0; i < m; ++i) {
        std::vector<aam::milp::LinTerm> terms;
        double anchor_lhs = 0.0;
        for (int j = 0; j < n; ++j) {
            if (rng.uniform() < 0.5) continue;
            const double c = static_cast<double>(static_cast<int>(rng.below(11)) - 5);
            if (c == 0.0) continue;
            terms.push_back({j, c});
            anchor_lhs += c * anchor[j];
        }
        if (terms.empty()) continue;
        const double u = rng.uniform();
        const aam::milp::Sense sense = u < 0.45   ? aam::milp::Sense::LE
                                       : u < 0.9 ? aam::milp::Sense::GE
                                                 : aam::milp::Sense::EQ;
        double rhs;
        if (anchored) {
            const double slack = static_cast<double>(rng.below(4));
            rhs = sense == aam::milp::Sense::LE   ? anchor_lhs + slack
                  : sense == aam::milp::Sense::GE ? anchor_lhs - slack
                                                  : anchor_lhs;
        } else {
            rhs = static_cast<double>(static_cast<int>(rng.below(13)) - 4);
        }
        out.model.add_row(std::move(terms), sense, rhs);
    }
    return out;
}

/// Enumerate every integer assignment; returns the minimal objective if any
/// assignment is feasible.
inline std::optional<double> brute_force_milp(const RandomMilp& rm) {
    const int n = rm.model.n_vars();
    std::vector<int> x(n, 0);
    std::optional<double> best;
    for (;;) {
        bool feasible = true;
        for (const auto& row : rm.model.rows()) {
            double lhs = 0.0;
            for (const auto& t : row.terms) lhs += t.coef * x[t.var];
            switch (row.sense) {
                case aam::milp::Sense::LE: feasible = lhs <= row.rhs + 1e-9; break;
                case aam::milp::Sense::GE: feasible = lhs >= row.rhs - 1e-9; break;
                case aam::milp::Sense::EQ: feasible = std::abs(lhs - row.rhs) <= 1e-9; break;
            }
            if (!feasible) break;
        }
        if (feasible) {
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += rm.model.var(j).obj * x[j];
            if (!best || obj < *best) best = obj;
        }
        int j = 0;
        while (j < n && ++x[j] > rm.ranges[j]) x[j++] = 0;
        if (j == n) break;
    }
    return best;
}

}  // namespace testsupport
