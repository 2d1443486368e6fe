#pragma once

#include <string>
#include <vector>

#include "aam/llp.hpp"

namespace aam {

/// A deployable congestion-management strategy: one toll vector per frame of
/// the day, with the days and weights that produced it.
struct StrategyBook {
    std::vector<TollVector> frames;
    std::vector<int> contributing_days;
    std::vector<double> weights;

    std::string to_json() const;
    static StrategyBook from_json(const std::string& text);
};

/// Per-day decision history: one TollVector per frame.
using DayTolls = std::vector<TollVector>;

/// Type 1: arithmetic mean of each frame's decisions across days.
StrategyBook aggregate_naive(const std::vector<DayTolls>& history);

/// Discrete 1-D Wasserstein distance on unit-spaced frame support:
/// sum over m of |CDF_P(m) - CDF_Q(m)|. Inputs must be normalized.
double wasserstein_1d(const std::vector<double>& p, const std::vector<double>& q);

/// Type 2: weights w_n proportional to 1/(d_W(test, day n) + eps), then the
/// weighted per-frame sums of the historical decisions.
StrategyBook aggregate_weighted(const std::vector<DayTolls>& history,
                                const std::vector<std::vector<double>>& hist_demands,
                                const std::vector<double>& test_demand, double eps = 1e-6);

}  // namespace aam
