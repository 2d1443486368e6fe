#include "aam/hlp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "aam/parallel.hpp"
#include "aam/rng.hpp"

namespace aam {

using milp::LinExpr;
using milp::LinTerm;
using milp::Sense;

namespace {

// Periods overlapped by [enter, exit) on a grid of period_s-long slots.
std::pair<int, int> overlapped_periods(double enter, double exit, double period_s, int horizon) {
    int first = static_cast<int>(std::floor(enter / period_s + 1e-9));
    int last = static_cast<int>(std::ceil(exit / period_s - 1e-9)) - 1;
    first = std::max(first, 0);
    last = std::min(last, horizon - 1);
    return {first, last};
}

}  // namespace

CongestionReport occupancy(const NetworkModel& net, const std::vector<FlightPlan>& plans) {
    const TimeGrid& grid = net.time();
    const double period_s = grid.period_seconds;

    CongestionReport rep;
    std::map<std::string, std::size_t> sector_pos;
    for (const auto& s : net.sectors()) {
        sector_pos[s.id] = rep.sector_ids.size();
        rep.sector_ids.push_back(s.id);
    }
    rep.kappa.assign(rep.sector_ids.size(), std::vector<int>(grid.horizon_periods, 0));
    rep.delta = rep.kappa;
    rep.per_period_delta.assign(grid.horizon_periods, 0);

    for (const auto& plan : plans) {
        const Path& path = net.path(plan.chosen_path);
        for (const auto& [sid, enter_off, exit_off] : net.sector_windows(path)) {
            const auto [first, last] = overlapped_periods(plan.actual_dep + enter_off,
                                                          plan.actual_dep + exit_off, period_s,
                                                          grid.horizon_periods);
            for (int tau = first; tau <= last; ++tau) ++rep.kappa[sector_pos.at(sid)][tau];
        }
    }
    for (std::size_t si = 0; si < rep.sector_ids.size(); ++si) {
        const int cap = net.sector(rep.sector_ids[si]).capacity;
        for (int tau = 0; tau < grid.horizon_periods; ++tau) {
            rep.delta[si][tau] = std::max(0, rep.kappa[si][tau] - cap);
            rep.per_period_delta[tau] += rep.delta[si][tau];
            rep.total += rep.delta[si][tau];
        }
    }
    return rep;
}

namespace {

// The follower program needs sector occupancy as a linear function of the
// schedule. Entry periods are step functions of the departure time, so each
// (flight, path) box splits into intervals of constant occupancy signature;
// one binary per interval replaces the per-period arrival indicators.
struct PathInterval {
    const Path* path = nullptr;
    double dep_lo = 0.0, dep_hi = 0.0;
    int landing_period = -1;
    std::vector<std::pair<std::size_t, int>> occupied;  // (sector index, period)
};

struct FollowerStructure {
    // per flight: candidate intervals across its paths
    std::vector<std::vector<PathInterval>> intervals;
    std::vector<double> dep_lo, dep_hi;
};

FollowerStructure build_structure(const NetworkModel& net, const std::vector<FlightRequest>& flights) {
    const TimeGrid& grid = net.time();
    const double period_s = grid.period_seconds;
    const double frame_s = grid.frame_seconds();

    std::map<std::string, std::size_t> sector_pos;
    for (std::size_t i = 0; i < net.sectors().size(); ++i) sector_pos[net.sectors()[i].id] = i;

    FollowerStructure fs;
    fs.intervals.resize(flights.size());
    for (std::size_t fi = 0; fi < flights.size(); ++fi) {
        const FlightRequest& f = flights[fi];
        double min_tt = std::numeric_limits<double>::infinity();
        for (const Path* p : net.paths_for_od(f.origin, f.destination))
            min_tt = std::min(min_tt, p->travel_time);
        const double dep_lo = f.scheduled_dep;
        const double dep_hi = std::max(dep_lo, std::min(f.scheduled_dep + frame_s, frame_s - min_tt));
        fs.dep_lo.push_back(dep_lo);
        fs.dep_hi.push_back(dep_hi);

        for (const Path* p : net.paths_for_od(f.origin, f.destination)) {
            // departure times where any sector-entry or landing period flips
            std::vector<double> cuts{dep_lo, dep_hi};
            auto windows = net.sector_windows(*p);
            std::vector<double> offsets{p->travel_time};
            for (const auto& [sid, en, ex] : windows) {
                offsets.push_back(en);
                offsets.push_back(ex);
            }
            for (double off : offsets) {
                const int k_lo = static_cast<int>(std::floor((dep_lo + off) / period_s));
                const int k_hi = static_cast<int>(std::floor((dep_hi + off) / period_s));
                for (int k = k_lo; k <= k_hi + 1; ++k) {
                    const double cut = k * period_s - off;
                    if (cut > dep_lo + 1e-9 && cut < dep_hi - 1e-9) cuts.push_back(cut);
                }
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                       cuts.end());

            for (std::size_t c = 0; c + 1 < cuts.size() || (cuts.size() == 1 && c == 0); ++c) {
                const double lo = cuts[c];
                const double hi = cuts.size() == 1 ? cuts[c] : cuts[c + 1];
                const double mid = 0.5 * (lo + hi);
                const int land = static_cast<int>(std::floor((mid + p->travel_time) / period_s));
                if (land < 0 || land >= grid.horizon_periods) continue;
                PathInterval iv;
                iv.path = p;
                iv.dep_lo = lo;
                iv.dep_hi = hi;
                iv.landing_period = land;
                for (const auto& [sid, en, ex] : windows) {
                    const auto [first, last] =
                        overlapped_periods(mid + en, mid + ex, period_s, grid.horizon_periods);
                    for (int tau = first; tau <= last; ++tau)
                        iv.occupied.emplace_back(sector_pos.at(sid), tau);
                }
                fs.intervals[fi].push_back(std::move(iv));
            }
        }
        if (fs.intervals[fi].empty())
            throw SolveError("flight " + f.id + " has no feasible departure interval in the frame");
    }
    return fs;
}

struct FollowerSolve {
    bool feasible = false;
    int congestion = 0;
    double cost = 0.0;
    std::vector<FlightPlan> plans;
};

FollowerSolve solve_follower(const NetworkModel& net, const std::vector<FlightRequest>& flights,
                             const FollowerStructure& fs, const TollVector& tolls, double budget,
                             const milp::SolveLimits& limits) {
    const TimeGrid& grid = net.time();
    const int n_flights = static_cast<int>(flights.size());
    milp::MilpModel model;

    // d and y variables
    std::vector<int> d_vars(flights.size());
    std::vector<std::vector<int>> y_vars(flights.size());
    for (std::size_t fi = 0; fi < flights.size(); ++fi) {
        d_vars[fi] = model.add_var("d[" + flights[fi].id + "]", fs.dep_lo[fi], fs.dep_hi[fi], 0.0, false);
        for (std::size_t r = 0; r < fs.intervals[fi].size(); ++r)
            y_vars[fi].push_back(
                model.add_binary("y[" + flights[fi].id + "," + std::to_string(r) + "]"));
    }

    // one interval per flight; departure inside the chosen interval
    for (std::size_t fi = 0; fi < flights.size(); ++fi) {
        std::vector<LinTerm> one;
        std::vector<LinTerm> lo_link{{d_vars[fi], 1.0}};
        std::vector<LinTerm> hi_link{{d_vars[fi], 1.0}};
        for (std::size_t r = 0; r < y_vars[fi].size(); ++r) {
            one.push_back({y_vars[fi][r], 1.0});
            lo_link.push_back({y_vars[fi][r], -fs.intervals[fi][r].dep_lo});
            hi_link.push_back({y_vars[fi][r], -fs.intervals[fi][r].dep_hi});
        }
        model.add_row(std::move(one), Sense::EQ, 1.0, "iv[" + flights[fi].id + "]");
        model.add_row(std::move(lo_link), Sense::GE, 0.0);
        model.add_row(std::move(hi_link), Sense::LE, 0.0);
    }

    // separation disjunctions, arrivals expressed through interval choices
    auto arrival_expr = [&](std::size_t fi) {
        LinExpr e;
        e.add(d_vars[fi], 1.0);
        for (std::size_t r = 0; r < y_vars[fi].size(); ++r)
            e.add(y_vars[fi][r], fs.intervals[fi][r].path->travel_time);
        return e;
    };
    for (std::size_t i = 0; i < flights.size(); ++i) {
        for (std::size_t j = i + 1; j < flights.size(); ++j) {
            const FlightRequest& a = flights[i];
            const FlightRequest& b = flights[j];
            if (a.origin == b.origin) {
                const double sep = net.vertiport(a.origin).dep_separation_s();
                const int y = model.add_binary("ydep[" + a.id + "," + b.id + "]");
                LinExpr fwd;
                fwd.add(d_vars[i], 1.0).add(d_vars[j], -1.0);
                fwd.constant = -sep;
                milp::add_indicator(model, y, true, fwd, Sense::GE);
                LinExpr bwd;
                bwd.add(d_vars[j], 1.0).add(d_vars[i], -1.0);
                bwd.constant = -sep;
                milp::add_indicator(model, y, false, bwd, Sense::GE);
            }
            if (a.destination == b.destination) {
                const double sep = net.vertiport(a.destination).arr_separation_s();
                const int y = model.add_binary("yarr[" + a.id + "," + b.id + "]");
                LinExpr arr_a = arrival_expr(i), arr_b = arrival_expr(j);
                LinExpr fwd = arr_a;
                for (const auto& t : arr_b.terms) fwd.add(t.var, -t.coef);
                fwd.constant = -sep;
                milp::add_indicator(model, y, true, fwd, Sense::GE);
                LinExpr bwd = arr_b;
                for (const auto& t : arr_a.terms) bwd.add(t.var, -t.coef);
                bwd.constant = -sep;
                milp::add_indicator(model, y, false, bwd, Sense::GE);
            }
        }
    }

    // congestion variables over the sector-periods any interval can touch
    std::map<std::pair<std::size_t, int>, std::vector<LinTerm>> load;
    for (std::size_t fi = 0; fi < flights.size(); ++fi)
        for (std::size_t r = 0; r < y_vars[fi].size(); ++r)
            for (const auto& key : fs.intervals[fi][r].occupied)
                load[key].push_back({y_vars[fi][r], 1.0});

    for (auto& [key, terms] : load) {
        const auto& [si, tau] = key;
        const int cap = net.sectors()[si].capacity;
        const std::string tag = net.sectors()[si].id + "," + std::to_string(tau);
        const int delta =
            model.add_var("delta[" + tag + "]", 0.0, static_cast<double>(n_flights), 1.0, false);
        const int mu = model.add_binary("mu[" + tag + "]");
        // count - cap <= delta
        std::vector<LinTerm> lower = terms;
        lower.push_back({delta, -1.0});
        model.add_row(std::move(lower), Sense::LE, static_cast<double>(cap));
        // delta <= (count - cap) + M(1 - mu)
        const double m1 = n_flights + cap + 1.0;
        std::vector<LinTerm> upper;
        upper.push_back({delta, 1.0});
        for (const auto& t : terms) upper.push_back({t.var, -1.0});
        upper.push_back({mu, m1});
        model.add_row(std::move(upper), Sense::LE, m1 - cap);
        // delta <= M mu
        model.add_row({{delta, 1.0}, {mu, -static_cast<double>(n_flights)}}, Sense::LE, 0.0);
    }

    // value matching: toll-shifted scheduling cost within the predicted budget
    std::vector<LinTerm> cost_terms;
    double cost_const = 0.0;
    for (std::size_t fi = 0; fi < flights.size(); ++fi) {
        const FlightRequest& f = flights[fi];
        cost_terms.push_back({d_vars[fi], f.delay_cost});
        cost_const -= f.delay_cost * f.scheduled_dep;
        const Vertiport& dest = net.vertiport(f.destination);
        for (std::size_t r = 0; r < y_vars[fi].size(); ++r) {
            const PathInterval& iv = fs.intervals[fi][r];
            const double c = iv.path->base_cost + tolls.path_toll(iv.path->id) +
                             dest.base_landing_fee[iv.landing_period] +
                             tolls.landing_toll(f.destination, iv.landing_period);
            cost_terms.push_back({y_vars[fi][r], c});
        }
    }
    model.add_row(std::move(cost_terms), Sense::LE, budget - cost_const, "value_match");

    milp::MilpSolution sol = milp::solve(model, limits);
    FollowerSolve out;
    if (sol.status != milp::SolveStatus::Optimal) return out;

    out.feasible = true;
    double cost = cost_const;
    for (std::size_t fi = 0; fi < flights.size(); ++fi) {
        const FlightRequest& f = flights[fi];
        int chosen = -1;
        for (std::size_t r = 0; r < y_vars[fi].size(); ++r)
            if (sol.x[y_vars[fi][r]] > 0.5) chosen = static_cast<int>(r);
        if (chosen < 0) {
            out.feasible = false;
            return out;
        }
        const PathInterval& iv = fs.intervals[fi][chosen];
        FlightPlan plan;
        plan.flight = f.id;
        plan.actual_dep = std::clamp(sol.x[d_vars[fi]], iv.dep_lo, iv.dep_hi);
        plan.chosen_path = iv.path->id;
        plan.landing_period = iv.landing_period;
        plan.delay_cost_paid = f.delay_cost * std::max(0.0, plan.actual_dep - f.scheduled_dep);
        plan.path_cost_paid = iv.path->base_cost + tolls.path_toll(iv.path->id);
        plan.landing_fee_paid = net.vertiport(f.destination).base_landing_fee[iv.landing_period] +
                                tolls.landing_toll(f.destination, iv.landing_period);
        cost += f.delay_cost * plan.actual_dep + plan.path_cost_paid + plan.landing_fee_paid;
        out.plans.push_back(std::move(plan));
    }
    out.cost = cost;
    out.congestion = occupancy(net, out.plans).total;
    (void)grid;
    return out;
}

std::vector<std::vector<double>> latin_hypercube(int n, int dim, double hi, std::uint64_t seed) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim, 0.0));
    for (int d = 0; d < dim; ++d) {
        Rng rng(derive_seed(seed, "lhs-dim", static_cast<std::uint64_t>(d)));
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
        for (int i = 0; i < n; ++i) pts[i][d] = (perm[i] + rng.uniform()) / n * hi;
    }
    return pts;
}

}  // namespace

HlpDecision solve_hlp(const NetworkModel& net, const std::vector<FlightRequest>& flights,
                      const ValueEvaluator& value_fn, const TollSpace& space,
                      const HlpSearchConfig& cfg) {
    const int dim = space.dim();
    std::vector<std::vector<double>> candidates;
    candidates.emplace_back(dim, 0.0);  // the zero vector is always evaluated
    if (!cfg.explicit_candidates.empty()) {
        for (const auto& c : cfg.explicit_candidates)
            if (std::any_of(c.begin(), c.end(), [](double v) { return v != 0.0; }))
                candidates.push_back(c);
    } else {
        for (auto& c : latin_hypercube(cfg.n_candidates, dim, space.eps_max, cfg.seed))
            candidates.push_back(std::move(c));
    }

    const FollowerStructure fs = build_structure(net, flights);

    HlpDecision decision;
    double delta = cfg.delta_vm;
    for (int round = 0; round <= 3; ++round, delta *= 2.0) {
        std::vector<HlpCandidateLog> logs(candidates.size());
        std::vector<FollowerSolve> solves(candidates.size());
        parallel_for(candidates.size(), cfg.jobs, [&](std::size_t ci) {
            const auto& coords = candidates[ci];
            const TollVector tolls = space.expand(coords);
            const double predicted = value_fn(coords);
            const double budget = predicted * (1.0 + delta);
            FollowerSolve fsv =
                solve_follower(net, flights, fs, tolls, budget, cfg.follower_limits);
            logs[ci] = {coords, predicted, fsv.feasible, fsv.congestion, fsv.cost};
            solves[ci] = std::move(fsv);
        });

        int best = -1;
        for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
            if (!logs[ci].feasible) continue;
            if (best < 0) {
                best = static_cast<int>(ci);
                continue;
            }
            const auto& cur = logs[ci];
            const auto& inc = logs[best];
            auto l1 = [](const std::vector<double>& v) {
                double s = 0.0;
                for (double x : v) s += std::abs(x);
                return s;
            };
            if (cur.congestion < inc.congestion ||
                (cur.congestion == inc.congestion &&
                 (cur.predicted_value < inc.predicted_value - 1e-12 ||
                  (std::abs(cur.predicted_value - inc.predicted_value) <= 1e-12 &&
                   l1(cur.toll_coords) < l1(inc.toll_coords) - 1e-12))))
                best = static_cast<int>(ci);
        }

        if (best >= 0) {
            decision.toll_coords = candidates[best];
            decision.tolls = space.expand(candidates[best]);
            decision.predicted_value = logs[best].predicted_value;
            decision.realized_congestion = logs[best].congestion;
            decision.plans = std::move(solves[best].plans);
            decision.search_log = std::move(logs);
            decision.delta_vm_used = delta;
            return decision;
        }
        decision.search_log = std::move(logs);
    }

    // Every candidate failed value matching: fall back to the plain zero-toll
    // schedule and flag the decision.
    LlpResult base = solve_llp(net, flights, TollVector{}, {}, cfg.follower_limits);
    decision.toll_coords.assign(dim, 0.0);
    decision.tolls = space.expand(decision.toll_coords);
    decision.predicted_value = value_fn(decision.toll_coords);
    decision.realized_congestion = occupancy(net, base.plans).total;
    decision.plans = base.plans;
    decision.delta_vm_used = delta;
    decision.zero_toll_fallback = true;
    return decision;
}

std::string HlpDecision::to_json() const {
    nlohmann::json j;
    j["toll_coords"] = toll_coords;
    j["predicted_value"] = predicted_value;
    j["realized_congestion"] = realized_congestion;
    j["delta_vm_used"] = delta_vm_used;
    j["zero_toll_fallback"] = zero_toll_fallback;
    j["path_tolls"] = tolls.path_tolls;
    j["landing_tolls"] = tolls.landing_tolls;
    nlohmann::json log = nlohmann::json::array();
    for (const auto& e : search_log) {
        log.push_back({{"tolls", e.toll_coords},
                       {"predicted", e.predicted_value},
                       {"feasible", e.feasible},
                       {"congestion", e.congestion},
                       {"cost", e.follower_cost}});
    }
    j["search_log"] = log;
    return j.dump(2);
}

}  // namespace aam
