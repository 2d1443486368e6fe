#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aam/network.hpp"

namespace aam {

/// One flight request inside a solve frame. scheduled_dep is seconds from
/// frame start. priority flights come only from the pop-up sampler.
struct FlightRequest {
    std::string id;
    std::string origin;
    std::string destination;
    double scheduled_dep = 0.0;
    double delay_cost = 0.0;  // currency per second of delay
    std::string psu_tag;
    bool priority = false;
};

/// Sinusoidal OD demand parameters: mean(t) = max(0, A(t) sin(B t + C) + Gamma(t)),
/// with A and Gamma piecewise constant per frame and t in seconds from day start.
struct OdDemand {
    std::vector<double> amplitude;  // per frame, flights/period
    std::vector<double> baseline;   // per frame, flights/period
    double phase = 0.0;             // radians
};

struct DemandParams {
    double frequency = 0.0;     // radians per second, shared across ODs
    double noise_sigma = 0.0;   // per-frame Gaussian noise, flights/period
    double delay_cost = 0.05;   // currency/second, applied to sampled flights
    std::string profile_label;  // morning-peak | afternoon-peak | evening-peak
    double peak_window_start = 0.0;  // seconds from day start, for profile checks
    double peak_window_end = 0.0;
    std::map<std::pair<std::string, std::string>, OdDemand> od;

    const OdDemand& od_params(const std::string& origin, const std::string& destination) const;
};

struct DaySchedule {
    std::vector<std::vector<FlightRequest>> frames;
    std::vector<int> demand_histogram;  // realized flight count per frame

    std::string to_csv() const;  // flight id, origin, destination, t^d, priority
};

/// Demand preset document: day profile curves cycled across days, plus
/// busy-vertiport multipliers. Loaded from JSON.
struct DemandPreset {
    struct DayProfile {
        std::string profile_label;
        double phase = 0.0;
        std::vector<double> amplitude;  // per frame
        std::vector<double> baseline;   // per frame
        double peak_window_start = 0.0;
        double peak_window_end = 0.0;
    };
    std::string name;
    double frequency = 0.0;
    double noise_sigma = 0.0;
    double delay_cost = 0.05;
    double busy_amplitude_multiplier = 1.0;
    double busy_baseline_multiplier = 1.0;
    std::vector<DayProfile> day_profiles;

    static DemandPreset from_json(const std::string& json_text);
    static DemandPreset from_file(const std::string& filename);

    /// Resolve per-OD parameters for a given day (profiles cycle by day index).
    DemandParams resolve(const NetworkModel& net, int day_index) const;
};

/// Clamped mean demand for one OD pair at day-time t (seconds). Noise is not
/// added here; it enters per-frame during sampling.
double mean_demand(const DemandParams& params, const NetworkModel& net,
                   const std::string& origin, const std::string& destination, double t);

/// Sample a full day of flight requests: per OD, exponential interarrival
/// times at the instantaneous (noise-shifted, floored) mean rate.
DaySchedule sample_schedule(const DemandParams& params, const NetworkModel& net, std::uint64_t day_seed);

/// Pop-up priority flights for one frame: per OD pair, with probability `rate`
/// one priority flight with a uniform departure time inside the frame (capped
/// so its shortest path still lands within the frame horizon).
std::vector<FlightRequest> sample_popups(const DaySchedule& base, const NetworkModel& net, double rate,
                                         int frame, std::uint64_t seed);

/// Normalize a per-frame histogram into a distribution summing to 1.
/// Throws on an all-zero histogram.
std::vector<double> normalize_demand(const std::vector<double>& hist);
std::vector<double> normalize_demand(const std::vector<int>& hist);

}  // namespace aam
