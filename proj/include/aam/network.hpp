#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aam/errors.hpp"

namespace aam {

/// Discrete time grid shared by all planners. One solve frame spans
/// horizon_periods * period_seconds seconds; a day holds llp_frames_per_day frames.
struct TimeGrid {
    int horizon_periods = 3;
    int period_seconds = 3600;
    int llp_frames_per_day = 8;
    int days = 3;

    double frame_seconds() const { return static_cast<double>(horizon_periods) * period_seconds; }
    double day_seconds() const { return frame_seconds() * llp_frames_per_day; }

    void validate() const;
};

struct Vertiport {
    std::string id;
    double dep_capacity = 0.0;  // flights per hour
    double arr_capacity = 0.0;  // flights per hour
    std::vector<double> base_landing_fee;  // one entry per period
    bool busy = false;

    double dep_separation_s() const { return 3600.0 / dep_capacity; }
    double arr_separation_s() const { return 3600.0 / arr_capacity; }
};

struct Path {
    std::string id;
    std::string origin;
    std::string destination;
    double travel_time = 0.0;  // seconds
    double base_cost = 0.0;
    // (sector id, entry offset from departure, seconds), strictly increasing offsets.
    std::vector<std::pair<std::string, double>> sector_offsets;
};

struct AirspaceSector {
    std::string id;
    int capacity = 0;  // max simultaneous flights per period
};

/// Static network description. Immutable after load; derived indices are
/// built once and safe to share read-only across workers.
class NetworkModel {
public:
    NetworkModel() = default;
    NetworkModel(TimeGrid time, std::vector<Vertiport> vertiports, std::vector<Path> paths,
                 std::vector<AirspaceSector> sectors);

    const TimeGrid& time() const { return time_; }
    const std::vector<Vertiport>& vertiports() const { return vertiports_; }
    const std::vector<Path>& paths() const { return paths_; }
    const std::vector<AirspaceSector>& sectors() const { return sectors_; }

    const Vertiport& vertiport(const std::string& id) const;
    const Path& path(const std::string& id) const;
    const AirspaceSector& sector(const std::string& id) const;
    bool has_vertiport(const std::string& id) const { return vertiport_ix_.count(id) > 0; }
    bool has_sector(const std::string& id) const { return sector_ix_.count(id) > 0; }

    /// Paths serving an origin->destination pair, in declaration order.
    /// Throws if the pair has no path.
    const std::vector<const Path*>& paths_for_od(const std::string& origin,
                                                 const std::string& destination) const;
    bool has_od(const std::string& origin, const std::string& destination) const;
    /// All OD pairs with at least one path, sorted.
    std::vector<std::pair<std::string, std::string>> od_pairs() const;

    /// Occupancy window of each sector along a path: (sector id, entry offset, exit offset).
    /// Exit is the next sector's entry or the path arrival.
    std::vector<std::tuple<std::string, double, double>> sector_windows(const Path& p) const;

    void rebuild_indices();

private:
    TimeGrid time_;
    std::vector<Vertiport> vertiports_;
    std::vector<Path> paths_;
    std::vector<AirspaceSector> sectors_;

    std::map<std::string, std::size_t> vertiport_ix_;
    std::map<std::string, std::size_t> path_ix_;
    std::map<std::string, std::size_t> sector_ix_;
    std::map<std::pair<std::string, std::string>, std::vector<const Path*>> od_paths_;

    void validate() const;
};

/// Parse and validate a scenario document (JSON text). Deterministic: the same
/// document yields an identical model.
NetworkModel load_network(const std::string& json_text);
NetworkModel load_network_file(const std::string& filename);

/// Exactly the paths whose sector_offsets mention the sector. Sorted by path id.
std::vector<std::string> flights_through_sector(const NetworkModel& net, const std::string& sector_id);

}  // namespace aam
