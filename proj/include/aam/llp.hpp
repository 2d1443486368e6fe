#pragma once

#include <map>
#include <string>
#include <vector>

#include "aam/demand.hpp"
#include "aam/milp.hpp"
#include "aam/network.hpp"

namespace aam {

/// Congestion-management pricing decision: per-path tolls and per-vertiport
/// per-period landing-fee adjustments. Zero everywhere off the tolled sets.
struct TollVector {
    std::map<std::string, double> path_tolls;
    std::map<std::string, std::vector<double>> landing_tolls;
    std::vector<std::string> tolled_paths;
    std::vector<std::string> tolled_vertiports;

    double path_toll(const std::string& path_id) const;
    double landing_toll(const std::string& vertiport_id, int period) const;
    bool is_zero() const;
    void validate(const NetworkModel& net, double eps_max) const;
};

/// Maps between flat toll coordinates (the surrogate/search space) and a
/// TollVector. Vertiport coordinates are either one scalar per vertiport per
/// frame, or one per period when per_period_vertiport is set.
struct TollSpace {
    std::vector<std::string> path_ids;
    std::vector<std::string> vertiport_ids;
    bool per_period_vertiport = false;
    int horizon_periods = 1;
    double eps_max = 30.0;

    int dim() const {
        return static_cast<int>(path_ids.size()) +
               static_cast<int>(vertiport_ids.size()) * (per_period_vertiport ? horizon_periods : 1);
    }
    TollVector expand(const std::vector<double>& coords) const;
    std::vector<double> flatten(const TollVector& tolls) const;

    /// All paths plus per-period coordinates for all vertiports.
    static TollSpace full(const NetworkModel& net, double eps_max);
};

/// Solved schedule for one flight. Cost components are toll-inclusive.
struct FlightPlan {
    std::string flight;
    double actual_dep = 0.0;
    std::string chosen_path;
    int landing_period = 0;
    double delay_cost_paid = 0.0;
    double path_cost_paid = 0.0;
    double landing_fee_paid = 0.0;

    double total_cost() const { return delay_cost_paid + path_cost_paid + landing_fee_paid; }
};

struct LlpResult {
    std::vector<FlightPlan> plans;
    double objective = 0.0;
    long nodes = 0;
    long lp_iterations = 0;
    double wall_seconds = 0.0;

    std::string to_csv() const;
    std::string to_json() const;
};

/// Scheduling model plus the variable bookkeeping needed to read solutions back.
struct LlpModel {
    milp::MilpModel model;
    struct FlightVars {
        int d_var = -1;
        std::vector<std::pair<const Path*, int>> path_vars;  // (path, I var)
        std::vector<int> z_vars;                             // one per period
        double dep_lo = 0.0, dep_hi = 0.0;
    };
    std::vector<FlightRequest> flights;  // model order
    std::vector<FlightVars> vars;
};

/// Build the scheduling program: delay + path + landing-fee objective with
/// toll-shifted costs, pairwise departure/arrival separation disjunctions,
/// landing-period big-M indicators and assignment rows.
LlpModel build_llp(const NetworkModel& net, const std::vector<FlightRequest>& flights,
                   const TollVector& tolls);

/// Pin pop-up flights: departure fixed at the sampled time, path fixed to the
/// shortest path of their OD pair (ties by lowest path id). Scheduled flights
/// keep their separation disjunctions against the now-constant pop-up side.
/// Conflicting pop-up pairs are rejected up front.
void add_popup_constraints(const NetworkModel& net, LlpModel& llp,
                           const std::vector<FlightRequest>& scheduled,
                           const std::vector<FlightRequest>& popups);

/// Build, pin pop-ups, solve to optimality and read back flight plans.
LlpResult solve_llp(const NetworkModel& net, const std::vector<FlightRequest>& scheduled,
                    const TollVector& tolls, const std::vector<FlightRequest>& popups = {},
                    const milp::SolveLimits& limits = {});

/// Shortest path for a flight's OD pair: minimum travel time, ties by lowest id.
const Path* shortest_path_for(const NetworkModel& net, const FlightRequest& flight);

/// Pairwise separation audit; returns human-readable descriptions of any
/// violated departure/arrival spacing, empty when clean.
std::vector<std::string> separation_violations(const NetworkModel& net,
                                               const std::vector<FlightRequest>& flights,
                                               const std::vector<FlightPlan>& plans,
                                               double tol = 1e-6);

}  // namespace aam
