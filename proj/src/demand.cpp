#include "aam/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "aam/rng.hpp"

namespace aam {

namespace {
constexpr double kRateFloor = 1e-6;  // flights/period, floor before exponential inversion
}

const OdDemand& DemandParams::od_params(const std::string& origin, const std::string& destination) const {
    auto it = od.find({origin, destination});
    if (it == od.end()) throw ConfigError("unknown OD pair: " + origin + "->" + destination);
    return it->second;
}

double mean_demand(const DemandParams& params, const NetworkModel& net, const std::string& origin,
                   const std::string& destination, double t) {
    if (t < 0.0 || t > net.time().day_seconds())
        throw ConfigError("mean_demand: t outside the day");
    const OdDemand& od = params.od_params(origin, destination);
    const double frame_s = net.time().frame_seconds();
    int frame = static_cast<int>(t / frame_s);
    frame = std::clamp(frame, 0, net.time().llp_frames_per_day - 1);
    const double a = od.amplitude.at(frame);
    const double g = od.baseline.at(frame);
    return std::max(0.0, a * std::sin(params.frequency * t + od.phase) + g);
}

DaySchedule sample_schedule(const DemandParams& params, const NetworkModel& net, std::uint64_t day_seed) {
    const TimeGrid& grid = net.time();
    const double frame_s = grid.frame_seconds();
    const double period_s = grid.period_seconds;

    DaySchedule day;
    day.frames.resize(grid.llp_frames_per_day);

    const auto ods = net.od_pairs();
    for (std::size_t oi = 0; oi < ods.size(); ++oi) {
        const auto& [origin, destination] = ods[oi];
        if (!params.od.count({origin, destination})) continue;

        // Longest path still has to land inside the frame horizon.
        double min_tt = std::numeric_limits<double>::infinity();
        for (const Path* p : net.paths_for_od(origin, destination))
            min_tt = std::min(min_tt, p->travel_time);

        for (int m = 0; m < grid.llp_frames_per_day; ++m) {
            Rng rng(derive_seed(day_seed, "demand-od-frame", oi, static_cast<std::uint64_t>(m)));
            const double noise = params.noise_sigma > 0.0 ? rng.normal(0.0, params.noise_sigma) : 0.0;
            const double frame_start = m * frame_s;
            const double frame_end = frame_start + frame_s;
            const double latest_dep = frame_s - min_tt;  // relative to frame start

            double clock = frame_start;
            int n_in_frame = 0;
            for (;;) {
                const double mean = mean_demand(params, net, origin, destination, std::min(clock, frame_end));
                const double rate_per_period = std::max(kRateFloor, mean + noise);
                const double rate_per_s = rate_per_period / period_s;
                clock += rng.exponential(rate_per_s);
                if (clock >= frame_end) break;
                const double dep = clock - frame_start;
                if (dep > latest_dep) continue;  // could not land within the horizon; demand lost
                FlightRequest req;
                std::ostringstream id;
                id << "f-m" << m << "-" << origin << destination << "-" << n_in_frame++;
                req.id = id.str();
                req.origin = origin;
                req.destination = destination;
                req.scheduled_dep = dep;
                req.delay_cost = params.delay_cost;
                req.psu_tag = "psu-" + std::to_string(oi % 2);
                req.priority = false;
                day.frames[m].push_back(std::move(req));
            }
        }
    }

    for (auto& frame : day.frames) {
        std::sort(frame.begin(), frame.end(), [](const FlightRequest& a, const FlightRequest& b) {
            if (a.scheduled_dep != b.scheduled_dep) return a.scheduled_dep < b.scheduled_dep;
            return a.id < b.id;
        });
        day.demand_histogram.push_back(static_cast<int>(frame.size()));
    }
    return day;
}

std::vector<FlightRequest> sample_popups(const DaySchedule& base, const NetworkModel& net, double rate,
                                         int frame, std::uint64_t seed) {
    if (rate < 0.0 || rate > 1.0) throw ConfigError("pop-up rate must lie in [0, 1]");
    if (frame < 0 || frame >= static_cast<int>(base.frames.size()))
        throw ConfigError("pop-up frame index out of range");
    const double frame_s = net.time().frame_seconds();

    std::vector<FlightRequest> out;
    const auto ods = net.od_pairs();
    for (std::size_t oi = 0; oi < ods.size(); ++oi) {
        Rng rng(derive_seed(seed, "popup-od", oi, static_cast<std::uint64_t>(frame)));
        if (rng.uniform() >= rate) continue;
        const auto& [origin, destination] = ods[oi];
        double min_tt = std::numeric_limits<double>::infinity();
        for (const Path* p : net.paths_for_od(origin, destination))
            min_tt = std::min(min_tt, p->travel_time);
        FlightRequest req;
        req.id = "pp-m" + std::to_string(frame) + "-" + origin + destination;
        req.origin = origin;
        req.destination = destination;
        // Uniform over the frame, capped so the shortest path lands in-horizon.
        req.scheduled_dep = rng.uniform(0.0, std::max(1.0, frame_s - min_tt));
        req.delay_cost = 0.0;
        req.psu_tag = "psu-pp";
        req.priority = true;
        out.push_back(std::move(req));
    }
    return out;
}

std::vector<double> normalize_demand(const std::vector<double>& hist) {
    double total = 0.0;
    for (double h : hist) total += h;
    if (total <= 0.0) throw ConfigError("normalize_demand: all-zero histogram");
    std::vector<double> out(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i) out[i] = hist[i] / total;
    return out;
}

std::vector<double> normalize_demand(const std::vector<int>& hist) {
    return normalize_demand(std::vector<double>(hist.begin(), hist.end()));
}

std::string DaySchedule::to_csv() const {
    std::ostringstream out;
    out << "frame,flight,origin,destination,scheduled_dep,priority\n";
    for (std::size_t m = 0; m < frames.size(); ++m)
        for (const auto& f : frames[m]) {
            char dep[32];
            std::snprintf(dep, sizeof(dep), "%.3f", f.scheduled_dep);
            out << m << "," << f.id << "," << f.origin << "," << f.destination << "," << dep << ","
                << (f.priority ? 1 : 0) << "\n";
        }
    return out.str();
}

DemandPreset DemandPreset::from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("demand preset is not valid JSON: ") + e.what());
    }
    DemandPreset preset;
    preset.name = doc.value("name", "unnamed");
    preset.frequency = doc.at("frequency").get<double>();
    preset.noise_sigma = doc.value("noise_sigma", 0.0);
    preset.delay_cost = doc.value("delay_cost", 0.05);
    preset.busy_amplitude_multiplier = doc.value("busy_amplitude_multiplier", 1.0);
    preset.busy_baseline_multiplier = doc.value("busy_baseline_multiplier", 1.0);
    if (preset.busy_amplitude_multiplier <= 1.0 || preset.busy_baseline_multiplier <= 1.0)
        throw ConfigError("demand preset: busy multipliers must exceed 1");
    if (!doc.contains("day_profiles") || doc["day_profiles"].empty())
        throw ConfigError("demand preset: day_profiles missing or empty");
    for (const auto& jp : doc["day_profiles"]) {
        DayProfile p;
        p.profile_label = jp.at("profile_label").get<std::string>();
        if (p.profile_label != "morning-peak" && p.profile_label != "afternoon-peak" &&
            p.profile_label != "evening-peak")
            throw ConfigError("demand preset: unknown profile_label " + p.profile_label);
        p.phase = jp.at("phase").get<double>();
        p.amplitude = jp.at("amplitude").get<std::vector<double>>();
        p.baseline = jp.at("baseline").get<std::vector<double>>();
        p.peak_window_start = jp.value("peak_window_start", 0.0);
        p.peak_window_end = jp.value("peak_window_end", 0.0);
        preset.day_profiles.push_back(std::move(p));
    }
    return preset;
}

DemandPreset DemandPreset::from_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ConfigError("cannot open demand preset: " + filename);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

DemandParams DemandPreset::resolve(const NetworkModel& net, int day_index) const {
    const DayProfile& prof = day_profiles[day_index % day_profiles.size()];
    const int frames = net.time().llp_frames_per_day;
    if (static_cast<int>(prof.amplitude.size()) != frames ||
        static_cast<int>(prof.baseline.size()) != frames)
        throw ConfigError("demand preset '" + name + "': profile arrays must have one entry per frame");

    DemandParams params;
    params.frequency = frequency;
    params.noise_sigma = noise_sigma;
    params.delay_cost = delay_cost;
    params.profile_label = prof.profile_label;
    params.peak_window_start = prof.peak_window_start;
    params.peak_window_end = prof.peak_window_end;

    for (const auto& [origin, destination] : net.od_pairs()) {
        const bool busy = net.vertiport(origin).busy || net.vertiport(destination).busy;
        OdDemand od;
        od.phase = prof.phase;
        od.amplitude = prof.amplitude;
        od.baseline = prof.baseline;
        if (busy) {
            for (double& a : od.amplitude) a *= busy_amplitude_multiplier;
            for (double& g : od.baseline) g *= busy_baseline_multiplier;
        }
        params.od[{origin, destination}] = std::move(od);
    }
    return params;
}

}  // namespace aam
