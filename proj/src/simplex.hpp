#pragma once

// Internal: bounded-variable primal simplex with an artificial-free composite
// phase 1. Dense basis inverse, sparse columns; sized for desk-scale models.

#include <cstdint>
#include <utility>
#include <vector>

#include "aam/milp.hpp"

namespace aam::milp::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;  // structural variable values
    long iterations = 0;
};

enum : unsigned char { AT_LO = 0, AT_UP = 1, BASIC = 2, AT_ZERO = 3 };

struct Basis {
    std::vector<int> basic;            // one column per row
    std::vector<unsigned char> state;  // per column
};

class SimplexSolver {
public:
    explicit SimplexSolver(const MilpModel& model);

    /// Solve with the given structural bounds. If warm is non-null and usable
    /// it seeds the starting basis and receives the final one.
    LpResult solve(const std::vector<double>& lo, const std::vector<double>& up, Basis* warm);

    int n_struct() const { return n_struct_; }
    int n_rows() const { return m_; }

private:
    int n_struct_ = 0;
    int m_ = 0;
    int n_cols_ = 0;  // structural + slack
    std::vector<std::vector<std::pair<int, double>>> cols_;  // sparse (row, coef)
    std::vector<double> obj_;                                // structural costs
    std::vector<double> rhs_;
    std::vector<double> slack_lo_, slack_up_;

    // per-solve state
    const std::vector<double>* lo_ = nullptr;
    const std::vector<double>* up_ = nullptr;
    std::vector<int> basic_;
    std::vector<unsigned char> state_;
    std::vector<double> binv_;  // m x m row-major
    std::vector<double> xb_;
    long iters_ = 0;
    bool bland_ = false;

    double lob(int j) const { return j < n_struct_ ? (*lo_)[j] : slack_lo_[j - n_struct_]; }
    double upb(int j) const { return j < n_struct_ ? (*up_)[j] : slack_up_[j - n_struct_]; }
    double cost(int j) const { return j < n_struct_ ? obj_[j] : 0.0; }
    double nonbasic_value(int j) const;

    void reset_to_slack_basis();
    bool factorize();
    void compute_xb();
    void ftran(int col, std::vector<double>& w) const;
    void pivot_update(int r, const std::vector<double>& w);

    // Returns true when the phase reached its optimum, false on iteration trouble.
    bool run_phase(bool phase1, long iter_cap, LpStatus& status_out);
};

}  // namespace aam::milp::detail
