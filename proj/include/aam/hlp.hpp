#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aam/llp.hpp"
#include "aam/network.hpp"

namespace aam {

/// Per-sector per-period congestion: traffic counts and flights above capacity.
struct CongestionReport {
    std::vector<std::string> sector_ids;      // network order
    std::vector<std::vector<int>> kappa;      // [sector][period] occupancy counts
    std::vector<std::vector<int>> delta;      // max(0, count - capacity)
    std::vector<int> per_period_delta;        // summed over sectors
    int total = 0;
};

/// Count sector occupancy from solved plans: each flight enters a sector at
/// actual_dep + offset and occupies it until the next sector entry (or the
/// path arrival); every overlapped period is counted.
CongestionReport occupancy(const NetworkModel& net, const std::vector<FlightPlan>& plans);

/// phi-hat: predicted follower optimum as a function of flat toll coordinates.
using ValueEvaluator = std::function<double(const std::vector<double>&)>;

struct HlpSearchConfig {
    int n_candidates = 64;      // Latin-hypercube samples over the toll box
    double delta_vm = 0.02;     // value-matching slack
    std::uint64_t seed = 1;
    std::vector<std::vector<double>> explicit_candidates;  // overrides sampling when non-empty
    milp::SolveLimits follower_limits;
    int jobs = 1;
};

struct HlpCandidateLog {
    std::vector<double> toll_coords;
    double predicted_value = 0.0;
    bool feasible = false;
    int congestion = 0;
    double follower_cost = 0.0;
};

struct HlpDecision {
    std::vector<double> toll_coords;
    TollVector tolls;
    double predicted_value = 0.0;
    int realized_congestion = 0;
    std::vector<FlightPlan> plans;  // follower plans backing the decision
    std::vector<HlpCandidateLog> search_log;
    double delta_vm_used = 0.0;
    bool zero_toll_fallback = false;

    std::string to_json() const;
};

/// Candidate-set congestion pricing: for each sampled toll vector (the zero
/// vector always included), solve the follower program minimizing total
/// congestion over all scheduling constraints with toll-shifted costs plus the
/// value-matching budget cost <= phi_hat * (1 + delta_vm); return the
/// candidate with the least realized congestion. If every candidate is
/// infeasible the slack doubles (up to three times) before falling back to
/// the zero-toll schedule.
HlpDecision solve_hlp(const NetworkModel& net, const std::vector<FlightRequest>& flights,
                      const ValueEvaluator& value_fn, const TollSpace& space,
                      const HlpSearchConfig& cfg);

}  // namespace aam
