#include "aam/network.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace aam {

void TimeGrid::validate() const {
    if (horizon_periods <= 0 || period_seconds <= 0 || llp_frames_per_day <= 0 || days <= 0)
        throw ConfigError("time grid: all fields must be positive integers");
}

NetworkModel::NetworkModel(TimeGrid time, std::vector<Vertiport> vertiports, std::vector<Path> paths,
                           std::vector<AirspaceSector> sectors)
    : time_(time),
      vertiports_(std::move(vertiports)),
      paths_(std::move(paths)),
      sectors_(std::move(sectors)) {
    validate();
    rebuild_indices();
}

void NetworkModel::validate() const {
    time_.validate();
    std::set<std::string> vert_ids, sector_ids, path_ids;
    for (const auto& v : vertiports_) {
        if (!vert_ids.insert(v.id).second) throw ConfigError("duplicate vertiport id: " + v.id);
        if (v.dep_capacity <= 0.0) throw ConfigError("non-positive dep_capacity at vertiport " + v.id);
        if (v.arr_capacity <= 0.0) throw ConfigError("non-positive arr_capacity at vertiport " + v.id);
        if (static_cast<int>(v.base_landing_fee.size()) != time_.horizon_periods)
            throw ConfigError("vertiport " + v.id + ": base_landing_fee needs exactly " +
                              std::to_string(time_.horizon_periods) + " entries");
        for (double fee : v.base_landing_fee)
            if (fee < 0.0) throw ConfigError("vertiport " + v.id + ": negative landing fee");
    }
    for (const auto& s : sectors_) {
        if (!sector_ids.insert(s.id).second) throw ConfigError("duplicate sector id: " + s.id);
        if (s.capacity < 0) throw ConfigError("negative capacity at sector " + s.id);
    }
    for (const auto& p : paths_) {
        if (!path_ids.insert(p.id).second) throw ConfigError("duplicate path id: " + p.id);
        if (!vert_ids.count(p.origin))
            throw ConfigError("path " + p.id + " references undefined vertiport " + p.origin);
        if (!vert_ids.count(p.destination))
            throw ConfigError("path " + p.id + " references undefined vertiport " + p.destination);
        if (p.origin == p.destination) throw ConfigError("path " + p.id + ": origin equals destination");
        if (p.travel_time <= 0.0) throw ConfigError("path " + p.id + ": non-positive travel_time");
        if (p.base_cost < 0.0) throw ConfigError("path " + p.id + ": negative base_cost");
        double prev = -1.0;
        for (const auto& [sid, off] : p.sector_offsets) {
            if (!sector_ids.count(sid))
                throw ConfigError("path " + p.id + " references undefined sector " + sid);
            if (off < 0.0 || off >= p.travel_time)
                throw ConfigError("path " + p.id + ": sector offset out of [0, travel_time)");
            if (off <= prev) throw ConfigError("path " + p.id + ": sector offsets must be strictly increasing");
            prev = off;
        }
    }
}

void NetworkModel::rebuild_indices() {
    vertiport_ix_.clear();
    path_ix_.clear();
    sector_ix_.clear();
    od_paths_.clear();
    for (std::size_t i = 0; i < vertiports_.size(); ++i) vertiport_ix_[vertiports_[i].id] = i;
    for (std::size_t i = 0; i < sectors_.size(); ++i) sector_ix_[sectors_[i].id] = i;
    for (std::size_t i = 0; i < paths_.size(); ++i) {
        path_ix_[paths_[i].id] = i;
        od_paths_[{paths_[i].origin, paths_[i].destination}].push_back(&paths_[i]);
    }
}

const Vertiport& NetworkModel::vertiport(const std::string& id) const {
    auto it = vertiport_ix_.find(id);
    if (it == vertiport_ix_.end()) throw ConfigError("unknown vertiport: " + id);
    return vertiports_[it->second];
}

const Path& NetworkModel::path(const std::string& id) const {
    auto it = path_ix_.find(id);
    if (it == path_ix_.end()) throw ConfigError("unknown path: " + id);
    return paths_[it->second];
}

const AirspaceSector& NetworkModel::sector(const std::string& id) const {
    auto it = sector_ix_.find(id);
    if (it == sector_ix_.end()) throw ConfigError("unknown sector: " + id);
    return sectors_[it->second];
}

bool NetworkModel::has_od(const std::string& origin, const std::string& destination) const {
    return od_paths_.count({origin, destination}) > 0;
}

const std::vector<const Path*>& NetworkModel::paths_for_od(const std::string& origin,
                                                           const std::string& destination) const {
    auto it = od_paths_.find({origin, destination});
    if (it == od_paths_.end())
        throw ConfigError("OD pair with zero paths: " + origin + "->" + destination);
    return it->second;
}

std::vector<std::pair<std::string, std::string>> NetworkModel::od_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(od_paths_.size());
    for (const auto& [od, _] : od_paths_) out.push_back(od);
    return out;
}

std::vector<std::tuple<std::string, double, double>> NetworkModel::sector_windows(const Path& p) const {
    std::vector<std::tuple<std::string, double, double>> out;
    for (std::size_t i = 0; i < p.sector_offsets.size(); ++i) {
        const double exit = (i + 1 < p.sector_offsets.size()) ? p.sector_offsets[i + 1].second
                                                              : p.travel_time;
        out.emplace_back(p.sector_offsets[i].first, p.sector_offsets[i].second, exit);
    }
    return out;
}

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(ctx + ": missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

std::string require_string(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigError(ctx + ": missing or non-string field '" + key + "'");
    return j[key].get<std::string>();
}

}  // namespace

NetworkModel load_network(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario document is not valid JSON: ") + e.what());
    }
    for (const char* key : {"time", "vertiports", "paths", "sectors"})
        if (!doc.contains(key)) throw ConfigError(std::string("scenario document: missing key '") + key + "'");

    TimeGrid grid;
    const json& t = doc["time"];
    grid.horizon_periods = static_cast<int>(require_number(t, "horizon_periods", "time"));
    grid.period_seconds = static_cast<int>(require_number(t, "period_seconds", "time"));
    grid.llp_frames_per_day = static_cast<int>(require_number(t, "llp_frames_per_day", "time"));
    grid.days = static_cast<int>(require_number(t, "days", "time"));

    std::vector<Vertiport> verts;
    for (const auto& jv : doc["vertiports"]) {
        Vertiport v;
        v.id = require_string(jv, "id", "vertiport");
        v.dep_capacity = require_number(jv, "dep_capacity", "vertiport " + v.id);
        v.arr_capacity = require_number(jv, "arr_capacity", "vertiport " + v.id);
        if (!jv.contains("base_landing_fee") || !jv["base_landing_fee"].is_array())
            throw ConfigError("vertiport " + v.id + ": missing base_landing_fee array");
        for (const auto& fee : jv["base_landing_fee"]) v.base_landing_fee.push_back(fee.get<double>());
        v.busy = jv.value("busy", false);
        verts.push_back(std::move(v));
    }

    std::vector<AirspaceSector> sectors;
    for (const auto& js : doc["sectors"]) {
        AirspaceSector s;
        s.id = require_string(js, "id", "sector");
        s.capacity = static_cast<int>(require_number(js, "capacity", "sector " + s.id));
        sectors.push_back(std::move(s));
    }

    std::vector<Path> paths;
    for (const auto& jp : doc["paths"]) {
        Path p;
        p.id = require_string(jp, "id", "path");
        p.origin = require_string(jp, "origin", "path " + p.id);
        p.destination = require_string(jp, "destination", "path " + p.id);
        p.travel_time = require_number(jp, "travel_time", "path " + p.id);
        p.base_cost = require_number(jp, "base_cost", "path " + p.id);
        if (jp.contains("sector_offsets")) {
            for (const auto& so : jp["sector_offsets"]) {
                if (!so.is_array() || so.size() != 2)
                    throw ConfigError("path " + p.id + ": sector_offsets entries must be [sector, offset]");
                p.sector_offsets.emplace_back(so[0].get<std::string>(), so[1].get<double>());
            }
        }
        paths.push_back(std::move(p));
    }

    return NetworkModel(grid, std::move(verts), std::move(paths), std::move(sectors));
}

NetworkModel load_network_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ConfigError("cannot open network file: " + filename);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_network(buf.str());
}

std::vector<std::string> flights_through_sector(const NetworkModel& net, const std::string& sector_id) {
    net.sector(sector_id);  // raises on unknown id
    std::vector<std::string> out;
    for (const auto& p : net.paths())
        for (const auto& [sid, _] : p.sector_offsets)
            if (sid == sector_id) {
                out.push_back(p.id);
                break;
            }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace aam
