#pragma once

#include <limits>
#include <string>
#include <vector>

#include "aam/errors.hpp"

namespace aam::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LE, GE, EQ };

struct LinTerm {
    int var;
    double coef;
};

/// Affine expression sum(coef * var) + constant.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr& add(int var, double coef) {
        if (coef != 0.0) terms.push_back({var, coef});
        return *this;
    }
};

struct VarDef {
    std::string name;
    double lo = 0.0;
    double up = kInf;
    double obj = 0.0;
    bool integral = false;
};

struct RowDef {
    std::string name;
    std::vector<LinTerm> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

/// Sparse mixed-integer linear program, always minimizing.
class MilpModel {
public:
    int add_var(const std::string& name, double lo, double up, double obj, bool integral);
    int add_binary(const std::string& name, double obj = 0.0) {
        return add_var(name, 0.0, 1.0, obj, true);
    }
    int add_row(std::vector<LinTerm> terms, Sense sense, double rhs, const std::string& name = {});

    void set_bounds(int var, double lo, double up);
    void fix_var(int var, double value) { set_bounds(var, value, value); }
    void add_obj_offset(double v) { obj_offset_ += v; }

    int n_vars() const { return static_cast<int>(vars_.size()); }
    int n_rows() const { return static_cast<int>(rows_.size()); }
    const VarDef& var(int i) const { return vars_[i]; }
    const std::vector<VarDef>& vars() const { return vars_; }
    const std::vector<RowDef>& rows() const { return rows_; }
    double obj_offset() const { return obj_offset_; }

    /// [min, max] of an expression over the variable box.
    std::pair<double, double> expr_box(const LinExpr& e) const;

    /// Throws if a constraint references an undeclared variable or lo > up.
    void validate() const;

    /// Plain-text dump (LP-format style) for external cross-checking.
    std::string to_lp_format() const;

private:
    std::vector<VarDef> vars_;
    std::vector<RowDef> rows_;
    double obj_offset_ = 0.0;
};

/// Big-M encoding of "guard = 1 implies expr sense 0". M must certify
/// max |expr| over the variable box or the call is rejected.
/// Returns the ids of the added rows.
std::vector<int> add_big_m_indicator(MilpModel& model, int guard, const LinExpr& expr, Sense sense,
                                     double big_m);

/// Same encoding with the box-certified M computed internally, activating on
/// guard == active_value.
std::vector<int> add_indicator(MilpModel& model, int guard, bool active_value, const LinExpr& expr,
                               Sense sense);

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit };

struct SolveLimits {
    long max_nodes = 2000000;
    double time_limit_s = 1e18;
};

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    bool has_incumbent = false;
    long nodes = 0;
    long lp_iterations = 0;
    double wall_seconds = 0.0;
    double root_lp_objective = 0.0;  // LP relaxation optimum (minimization lower bound)

    static constexpr double feasibility_tol = 1e-7;
    static constexpr double integrality_tol = 1e-6;
};

/// Exact LP-based branch-and-bound; most-fractional branching, ties by lowest
/// variable id, down branch first. Deterministic for identical inputs.
MilpSolution solve(const MilpModel& model, const SolveLimits& limits = {});

/// Verify an assignment against bounds, rows and integrality.
bool check_solution(const MilpModel& model, const std::vector<double>& x,
                    double feas_tol = MilpSolution::feasibility_tol,
                    double int_tol = MilpSolution::integrality_tol);

}  // namespace aam::milp
