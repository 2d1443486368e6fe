#include <algorithm>
#include <chrono>
#include <cmath>

#include "aam/milp.hpp"
#include "simplex.hpp"

namespace aam::milp {

using detail::Basis;
using detail::LpResult;
using detail::LpStatus;
using detail::SimplexSolver;

namespace {

struct BnbState {
    const MilpModel* model;
    SimplexSolver* spx;
    std::vector<double> lo, up;
    std::vector<int> int_vars;
    SolveLimits limits;
    std::chrono::steady_clock::time_point t0;

    double incumbent_obj = kInf;
    std::vector<double> incumbent_x;
    bool have_incumbent = false;
    long nodes = 0;
    long lp_iterations = 0;
    bool budget_hit = false;

    bool out_of_budget() {
        if (nodes >= limits.max_nodes) return true;
        if (limits.time_limit_s < 1e17) {
            const double e = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (e > limits.time_limit_s) return true;
        }
        return false;
    }

    // Most fractional integer variable, ties by lowest id. -1 when integral.
    int pick_branch_var(const std::vector<double>& x) const {
        int best = -1;
        double best_dist = MilpSolution::integrality_tol;
        for (int j : int_vars) {
            const double f = x[j] - std::floor(x[j]);
            const double frac_dist = std::min(f, 1.0 - f);
            if (frac_dist > best_dist + 1e-12) {
                best = j;
                best_dist = frac_dist;
            }
        }
        return best;
    }

    void offer_incumbent(const std::vector<double>& x_lp) {
        std::vector<double> x = x_lp;
        double obj = 0.0;
        for (int j : int_vars) x[j] = std::round(x[j]);
        for (int j = 0; j < model->n_vars(); ++j) obj += model->var(j).obj * x[j];
        if (!have_incumbent || obj < incumbent_obj - 1e-9) {
            incumbent_obj = obj;
            incumbent_x = std::move(x);
            have_incumbent = true;
        }
    }

    void dfs(Basis basis) {
        if (budget_hit || out_of_budget()) {
            budget_hit = true;
            return;
        }
        ++nodes;
        LpResult lp = spx->solve(lo, up, &basis);
        lp_iterations += lp.iterations;
        if (lp.status == LpStatus::Infeasible) return;
        if (lp.status != LpStatus::Optimal) {
            // IterLimit/Unbounded below the root: treat conservatively as
            // unexplorable and record that the search is incomplete.
            budget_hit = true;
            return;
        }
        if (have_incumbent && lp.objective >= incumbent_obj - 1e-9) return;

        const int q = pick_branch_var(lp.x);
        if (q < 0) {
            offer_incumbent(lp.x);
            return;
        }
        const double f = lp.x[q];

        // down child first (x_q <= floor), then up
        const double old_up = up[q];
        up[q] = std::floor(f);
        if (lo[q] <= up[q] + 1e-9) dfs(basis);
        up[q] = old_up;

        const double old_lo = lo[q];
        lo[q] = std::ceil(f);
        if (lo[q] <= up[q] + 1e-9) dfs(basis);
        lo[q] = old_lo;
    }
};

}  // namespace

MilpSolution solve(const MilpModel& model, const SolveLimits& limits) {
    model.validate();
    const auto t0 = std::chrono::steady_clock::now();

    MilpSolution sol;
    if (model.n_vars() == 0) {
        // constant problem: rows with no variables are pure rhs checks
        for (const auto& r : model.rows()) {
            const bool ok = (r.sense == Sense::LE)   ? 0.0 <= r.rhs + 1e-12
                            : (r.sense == Sense::GE) ? 0.0 >= r.rhs - 1e-12
                                                     : std::abs(r.rhs) <= 1e-12;
            if (!ok) {
                sol.status = SolveStatus::Infeasible;
                return sol;
            }
        }
        sol.status = SolveStatus::Optimal;
        sol.objective = model.obj_offset();
        sol.has_incumbent = true;
        return sol;
    }

    SimplexSolver spx(model);
    BnbState st;
    st.model = &model;
    st.spx = &spx;
    st.limits = limits;
    st.t0 = t0;
    st.lo.resize(model.n_vars());
    st.up.resize(model.n_vars());
    for (int j = 0; j < model.n_vars(); ++j) {
        const VarDef& v = model.var(j);
        double l = v.lo, u = v.up;
        if (v.integral) {
            if (std::isfinite(l)) l = std::ceil(l - MilpSolution::integrality_tol);
            if (std::isfinite(u)) u = std::floor(u + MilpSolution::integrality_tol);
            st.int_vars.push_back(j);
        }
        st.lo[j] = l;
        st.up[j] = u;
        if (l > u + 1e-12) {
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
    }

    // root relaxation
    Basis root_basis;
    LpResult root = spx.solve(st.lo, st.up, &root_basis);
    st.lp_iterations = root.iterations;
    if (root.status == LpStatus::Infeasible) {
        sol.status = SolveStatus::Infeasible;
        sol.lp_iterations = st.lp_iterations;
        return sol;
    }
    if (root.status == LpStatus::Unbounded) {
        sol.status = SolveStatus::Unbounded;
        sol.lp_iterations = st.lp_iterations;
        return sol;
    }
    if (root.status != LpStatus::Optimal) throw SolveError("LP solver failed at the root relaxation");
    sol.root_lp_objective = root.objective + model.obj_offset();

    st.nodes = 0;
    st.dfs(root_basis);

    sol.nodes = st.nodes;
    sol.lp_iterations = st.lp_iterations;
    sol.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (st.budget_hit) {
        sol.status = SolveStatus::NodeLimit;
        sol.has_incumbent = st.have_incumbent;
        if (st.have_incumbent) {
            sol.objective = st.incumbent_obj + model.obj_offset();
            sol.x = std::move(st.incumbent_x);
        }
        return sol;
    }
    if (!st.have_incumbent) {
        sol.status = SolveStatus::Infeasible;
        return sol;
    }
    sol.status = SolveStatus::Optimal;
    sol.has_incumbent = true;
    sol.objective = st.incumbent_obj + model.obj_offset();
    sol.x = std::move(st.incumbent_x);
    return sol;
}

}  // namespace aam::milp
