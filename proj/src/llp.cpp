#include "aam/llp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace aam {

using milp::LinExpr;
using milp::Sense;

double TollVector::path_toll(const std::string& path_id) const {
    auto it = path_tolls.find(path_id);
    return it == path_tolls.end() ? 0.0 : it->second;
}

double TollVector::landing_toll(const std::string& vertiport_id, int period) const {
    auto it = landing_tolls.find(vertiport_id);
    if (it == landing_tolls.end()) return 0.0;
    if (period < 0 || period >= static_cast<int>(it->second.size())) return 0.0;
    return it->second[period];
}

bool TollVector::is_zero() const {
    for (const auto& [_, v] : path_tolls)
        if (v != 0.0) return false;
    for (const auto& [_, vv] : landing_tolls)
        for (double v : vv)
            if (v != 0.0) return false;
    return true;
}

void TollVector::validate(const NetworkModel& net, double eps_max) const {
    const double tol = 1e-9;
    for (const auto& [pid, v] : path_tolls) {
        net.path(pid);
        if (v < -tol || v > eps_max + tol)
            throw ConfigError("path toll out of [0, eps_max] on " + pid);
        if (v != 0.0 && std::find(tolled_paths.begin(), tolled_paths.end(), pid) == tolled_paths.end())
            throw ConfigError("nonzero toll on untolled path " + pid);
    }
    for (const auto& [vid, vv] : landing_tolls) {
        net.vertiport(vid);
        for (double v : vv) {
            if (v < -tol || v > eps_max + tol)
                throw ConfigError("landing toll out of [0, eps_max] at " + vid);
            if (v != 0.0 &&
                std::find(tolled_vertiports.begin(), tolled_vertiports.end(), vid) ==
                    tolled_vertiports.end())
                throw ConfigError("nonzero toll on untolled vertiport " + vid);
        }
    }
}

TollVector TollSpace::expand(const std::vector<double>& coords) const {
    if (static_cast<int>(coords.size()) != dim())
        throw ConfigError("toll coordinate vector has wrong length");
    TollVector out;
    out.tolled_paths = path_ids;
    out.tolled_vertiports = vertiport_ids;
    std::size_t k = 0;
    for (const auto& pid : path_ids) out.path_tolls[pid] = coords[k++];
    for (const auto& vid : vertiport_ids) {
        std::vector<double> per_period(horizon_periods, 0.0);
        if (per_period_vertiport) {
            for (int tau = 0; tau < horizon_periods; ++tau) per_period[tau] = coords[k++];
        } else {
            const double v = coords[k++];
            for (int tau = 0; tau < horizon_periods; ++tau) per_period[tau] = v;
        }
        out.landing_tolls[vid] = std::move(per_period);
    }
    return out;
}

std::vector<double> TollSpace::flatten(const TollVector& tolls) const {
    std::vector<double> out;
    out.reserve(dim());
    for (const auto& pid : path_ids) out.push_back(tolls.path_toll(pid));
    for (const auto& vid : vertiport_ids) {
        if (per_period_vertiport)
            for (int tau = 0; tau < horizon_periods; ++tau) out.push_back(tolls.landing_toll(vid, tau));
        else
            out.push_back(tolls.landing_toll(vid, 0));
    }
    return out;
}

TollSpace TollSpace::full(const NetworkModel& net, double eps_max) {
    TollSpace s;
    for (const auto& p : net.paths()) s.path_ids.push_back(p.id);
    for (const auto& v : net.vertiports()) s.vertiport_ids.push_back(v.id);
    s.per_period_vertiport = true;
    s.horizon_periods = net.time().horizon_periods;
    s.eps_max = eps_max;
    return s;
}

const Path* shortest_path_for(const NetworkModel& net, const FlightRequest& flight) {
    const Path* best = nullptr;
    for (const Path* p : net.paths_for_od(flight.origin, flight.destination)) {
        if (!best || p->travel_time < best->travel_time - 1e-12 ||
            (std::abs(p->travel_time - best->travel_time) <= 1e-12 && p->id < best->id))
            best = p;
    }
    return best;
}

namespace {

double min_travel_time(const NetworkModel& net, const FlightRequest& f) {
    double tt = std::numeric_limits<double>::infinity();
    for (const Path* p : net.paths_for_od(f.origin, f.destination)) tt = std::min(tt, p->travel_time);
    return tt;
}

LinExpr arrival_expr(const LlpModel::FlightVars& fv) {
    LinExpr e;
    e.add(fv.d_var, 1.0);
    for (const auto& [p, var] : fv.path_vars) e.add(var, p->travel_time);
    return e;
}

}  // namespace

LlpModel build_llp(const NetworkModel& net, const std::vector<FlightRequest>& flights,
                   const TollVector& tolls) {
    const TimeGrid& grid = net.time();
    const double frame_s = grid.frame_seconds();
    const double period_s = grid.period_seconds;

    LlpModel llp;
    llp.flights = flights;
    llp.vars.resize(flights.size());

    for (std::size_t fi = 0; fi < flights.size(); ++fi) {
        const FlightRequest& f = flights[fi];
        if (!net.has_od(f.origin, f.destination))
            throw ConfigError("flight " + f.id + " has no available path for " + f.origin + "->" +
                              f.destination);
        auto& fv = llp.vars[fi];
        fv.dep_lo = f.scheduled_dep;
        fv.dep_hi = std::min(f.scheduled_dep + frame_s, frame_s - min_travel_time(net, f));
        if (fv.dep_hi < fv.dep_lo - 1e-9)
            throw SolveError("flight " + f.id + " cannot land within the frame horizon");
        fv.dep_hi = std::max(fv.dep_hi, fv.dep_lo);

        fv.d_var = llp.model.add_var("d[" + f.id + "]", fv.dep_lo, fv.dep_hi, f.delay_cost, false);
        llp.model.add_obj_offset(-f.delay_cost * f.scheduled_dep);

        for (const Path* p : net.paths_for_od(f.origin, f.destination)) {
            const double cost = p->base_cost + tolls.path_toll(p->id);
            fv.path_vars.emplace_back(p, llp.model.add_binary("I[" + f.id + "," + p->id + "]", cost));
        }
        const Vertiport& dest = net.vertiport(f.destination);
        for (int tau = 0; tau < grid.horizon_periods; ++tau) {
            const double fee = dest.base_landing_fee[tau] + tolls.landing_toll(f.destination, tau);
            fv.z_vars.push_back(llp.model.add_binary("z[" + f.id + "," + std::to_string(tau) + "]", fee));
        }

        // exactly one path, exactly one landing period
        std::vector<milp::LinTerm> one_path;
        for (const auto& [_, var] : fv.path_vars) one_path.push_back({var, 1.0});
        llp.model.add_row(std::move(one_path), Sense::EQ, 1.0, "path[" + f.id + "]");
        std::vector<milp::LinTerm> one_landing;
        for (int var : fv.z_vars) one_landing.push_back({var, 1.0});
        llp.model.add_row(std::move(one_landing), Sense::EQ, 1.0, "land[" + f.id + "]");

        // z[f,tau] = 1  ->  tau*P <= d + sum I*t^p <= (tau+1)*P
        for (int tau = 0; tau < grid.horizon_periods; ++tau) {
            LinExpr lo_side = arrival_expr(fv);
            lo_side.constant -= tau * period_s;
            milp::add_indicator(llp.model, fv.z_vars[tau], true, lo_side, Sense::GE);
            LinExpr hi_side = arrival_expr(fv);
            hi_side.constant -= (tau + 1) * period_s;
            milp::add_indicator(llp.model, fv.z_vars[tau], true, hi_side, Sense::LE);
        }
    }

    // pairwise separation disjunctions; pairs further apart than the pruning
    // window can never violate the spacing and are skipped
    const double window = 2.0 * frame_s;
    for (std::size_t i = 0; i < flights.size(); ++i) {
        for (std::size_t j = i + 1; j < flights.size(); ++j) {
            const FlightRequest& a = flights[i];
            const FlightRequest& b = flights[j];
            if (std::abs(a.scheduled_dep - b.scheduled_dep) > window) continue;

            if (a.origin == b.origin) {
                const double sep = net.vertiport(a.origin).dep_separation_s();
                const int y = llp.model.add_binary("ydep[" + a.id + "," + b.id + "]");
                LinExpr fwd;  // y=1 -> d_a - d_b >= sep
                fwd.add(llp.vars[i].d_var, 1.0).add(llp.vars[j].d_var, -1.0);
                fwd.constant = -sep;
                milp::add_indicator(llp.model, y, true, fwd, Sense::GE);
                LinExpr bwd;  // y=0 -> d_b - d_a >= sep
                bwd.add(llp.vars[j].d_var, 1.0).add(llp.vars[i].d_var, -1.0);
                bwd.constant = -sep;
                milp::add_indicator(llp.model, y, false, bwd, Sense::GE);
            }
            if (a.destination == b.destination) {
                const double sep = net.vertiport(a.destination).arr_separation_s();
                const int y = llp.model.add_binary("yarr[" + a.id + "," + b.id + "]");
                LinExpr arr_a = arrival_expr(llp.vars[i]);
                LinExpr arr_b = arrival_expr(llp.vars[j]);
                LinExpr fwd = arr_a;
                for (const auto& t : arr_b.terms) fwd.add(t.var, -t.coef);
                fwd.constant = -sep;
                milp::add_indicator(llp.model, y, true, fwd, Sense::GE);
                LinExpr bwd = arr_b;
                for (const auto& t : arr_a.terms) bwd.add(t.var, -t.coef);
                bwd.constant = -sep;
                milp::add_indicator(llp.model, y, false, bwd, Sense::GE);
            }
        }
    }
    return llp;
}

void add_popup_constraints(const NetworkModel& net, LlpModel& llp,
                           const std::vector<FlightRequest>& scheduled,
                           const std::vector<FlightRequest>& popups) {
    (void)scheduled;
    if (popups.empty()) return;
    for (const auto& pp : popups)
        if (!pp.priority) throw ConfigError("non-priority flight passed as pop-up: " + pp.id);

    // pop-up pairs with a shared vertiport must already be separated; nobody
    // can move to make room for them
    for (std::size_t i = 0; i < popups.size(); ++i) {
        for (std::size_t j = i + 1; j < popups.size(); ++j) {
            const FlightRequest& a = popups[i];
            const FlightRequest& b = popups[j];
            if (a.origin == b.origin) {
                const double sep = net.vertiport(a.origin).dep_separation_s();
                if (std::abs(a.scheduled_dep - b.scheduled_dep) < sep - 1e-9)
                    throw PopupConflictError(a.id, b.id,
                                             "pop-up departure conflict at " + a.origin + ": " + a.id +
                                                 " vs " + b.id);
            }
            if (a.destination == b.destination) {
                const double sep = net.vertiport(a.destination).arr_separation_s();
                const double arr_a = a.scheduled_dep + shortest_path_for(net, a)->travel_time;
                const double arr_b = b.scheduled_dep + shortest_path_for(net, b)->travel_time;
                if (std::abs(arr_a - arr_b) < sep - 1e-9)
                    throw PopupConflictError(a.id, b.id,
                                             "pop-up arrival conflict at " + a.destination + ": " + a.id +
                                                 " vs " + b.id);
            }
        }
    }

    for (const auto& pp : popups) {
        // locate the flight in model order
        std::size_t fi = llp.flights.size();
        for (std::size_t k = 0; k < llp.flights.size(); ++k)
            if (llp.flights[k].id == pp.id && llp.flights[k].priority) {
                fi = k;
                break;
            }
        if (fi == llp.flights.size())
            throw ConfigError("pop-up flight " + pp.id + " is not part of the model");
        auto& fv = llp.vars[fi];

        const Path* shortest = shortest_path_for(net, pp);
        if (pp.scheduled_dep + shortest->travel_time > net.time().frame_seconds() + 1e-9)
            throw SolveError("pop-up " + pp.id + " cannot land within the frame horizon");

        llp.model.fix_var(fv.d_var, pp.scheduled_dep);  // departs exactly on time
        for (const auto& [p, var] : fv.path_vars)
            llp.model.fix_var(var, p->id == shortest->id ? 1.0 : 0.0);
    }
}

LlpResult solve_llp(const NetworkModel& net, const std::vector<FlightRequest>& scheduled,
                    const TollVector& tolls, const std::vector<FlightRequest>& popups,
                    const milp::SolveLimits& limits) {
    std::vector<FlightRequest> all = scheduled;
    all.insert(all.end(), popups.begin(), popups.end());

    LlpModel llp = build_llp(net, all, tolls);
    add_popup_constraints(net, llp, scheduled, popups);

    milp::MilpSolution sol = milp::solve(llp.model, limits);
    if (sol.status == milp::SolveStatus::Infeasible) {
        if (!popups.empty())
            throw SolveError("scheduling infeasible: scheduled flights cannot be separated around the " +
                             std::to_string(popups.size()) + " pop-up flight(s) within the horizon");
        throw SolveError(
            "scheduling infeasible: vertiport separation demand exceeds the frame horizon capacity");
    }
    if (sol.status == milp::SolveStatus::NodeLimit)
        throw SolveError("scheduling solve exhausted its node budget");
    if (sol.status != milp::SolveStatus::Optimal)
        throw SolveError("scheduling solve failed");

    const TimeGrid& grid = net.time();
    LlpResult res;
    res.objective = sol.objective;
    res.nodes = sol.nodes;
    res.lp_iterations = sol.lp_iterations;
    res.wall_seconds = sol.wall_seconds;

    double component_sum = 0.0;
    for (std::size_t fi = 0; fi < llp.flights.size(); ++fi) {
        const FlightRequest& f = llp.flights[fi];
        const auto& fv = llp.vars[fi];
        FlightPlan plan;
        plan.flight = f.id;
        plan.actual_dep = sol.x[fv.d_var];

        const Path* chosen = nullptr;
        int n_paths = 0;
        for (const auto& [p, var] : fv.path_vars)
            if (sol.x[var] > 0.5) {
                chosen = p;
                ++n_paths;
            }
        if (n_paths != 1) throw SolveError("flight " + f.id + ": path assignment not unique");
        plan.chosen_path = chosen->id;

        int n_z = 0;
        for (int tau = 0; tau < grid.horizon_periods; ++tau)
            if (sol.x[fv.z_vars[tau]] > 0.5) {
                plan.landing_period = tau;
                ++n_z;
            }
        if (n_z != 1) throw SolveError("flight " + f.id + ": landing period not unique");

        const double arrival = plan.actual_dep + chosen->travel_time;
        if (arrival < plan.landing_period * grid.period_seconds - 1e-5 ||
            arrival > (plan.landing_period + 1) * grid.period_seconds + 1e-5)
            throw SolveError("flight " + f.id + ": landing period inconsistent with arrival time");

        plan.delay_cost_paid = f.delay_cost * std::max(0.0, plan.actual_dep - f.scheduled_dep);
        plan.path_cost_paid = chosen->base_cost + tolls.path_toll(chosen->id);
        plan.landing_fee_paid = net.vertiport(f.destination).base_landing_fee[plan.landing_period] +
                                tolls.landing_toll(f.destination, plan.landing_period);
        component_sum += plan.total_cost();
        res.plans.push_back(std::move(plan));
    }
    if (std::abs(component_sum - res.objective) > 1e-6 * std::max(1.0, std::abs(res.objective)))
        throw SolveError("objective does not match the sum of plan cost components");
    return res;
}

std::vector<std::string> separation_violations(const NetworkModel& net,
                                               const std::vector<FlightRequest>& flights,
                                               const std::vector<FlightPlan>& plans, double tol) {
    std::vector<std::string> out;
    if (flights.size() != plans.size()) {
        out.push_back("plan/flight count mismatch");
        return out;
    }
    for (std::size_t i = 0; i < plans.size(); ++i) {
        for (std::size_t j = i + 1; j < plans.size(); ++j) {
            const FlightRequest& a = flights[i];
            const FlightRequest& b = flights[j];
            if (a.origin == b.origin) {
                const double sep = net.vertiport(a.origin).dep_separation_s();
                const double gap = std::abs(plans[i].actual_dep - plans[j].actual_dep);
                if (gap < sep - tol) {
                    std::ostringstream msg;
                    msg << "departure spacing " << gap << " < " << sep << " at " << a.origin << " ("
                        << a.id << ", " << b.id << ")";
                    out.push_back(msg.str());
                }
            }
            if (a.destination == b.destination) {
                const double sep = net.vertiport(a.destination).arr_separation_s();
                const double arr_i = plans[i].actual_dep + net.path(plans[i].chosen_path).travel_time;
                const double arr_j = plans[j].actual_dep + net.path(plans[j].chosen_path).travel_time;
                const double gap = std::abs(arr_i - arr_j);
                if (gap < sep - tol) {
                    std::ostringstream msg;
                    msg << "arrival spacing " << gap << " < " << sep << " at " << a.destination << " ("
                        << a.id << ", " << b.id << ")";
                    out.push_back(msg.str());
                }
            }
        }
    }
    return out;
}

std::string LlpResult::to_csv() const {
    std::ostringstream out;
    out << "flight,actual_dep,path,landing_period,delay_cost,path_cost,landing_fee\n";
    for (const auto& p : plans) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.3f,%s,%d,%.2f,%.2f,%.2f", p.actual_dep,
                      p.chosen_path.c_str(), p.landing_period, p.delay_cost_paid, p.path_cost_paid,
                      p.landing_fee_paid);
        out << p.flight << "," << buf << "\n";
    }
    return out.str();
}

std::string LlpResult::to_json() const {
    nlohmann::json j;
    j["objective"] = objective;
    j["plans"] = nlohmann::json::array();
    for (const auto& p : plans) {
        nlohmann::json jp;
        jp["flight"] = p.flight;
        jp["actual_dep"] = p.actual_dep;
        jp["path"] = p.chosen_path;
        jp["landing_period"] = p.landing_period;
        jp["delay_cost"] = p.delay_cost_paid;
        jp["path_cost"] = p.path_cost_paid;
        jp["landing_fee"] = p.landing_fee_paid;
        j["plans"].push_back(jp);
    }
    return j.dump(2);
}

}  // namespace aam
