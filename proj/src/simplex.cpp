#include "simplex.hpp"

#include <algorithm>
#include <cmath>

namespace aam::milp::detail {

namespace {
constexpr double kFeasTol = 1e-7;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 128;
}  // namespace

SimplexSolver::SimplexSolver(const MilpModel& model) {
    n_struct_ = model.n_vars();
    m_ = model.n_rows();
    n_cols_ = n_struct_ + m_;
    cols_.assign(n_cols_, {});
    obj_.resize(n_struct_);
    for (int j = 0; j < n_struct_; ++j) obj_[j] = model.var(j).obj;
    rhs_.resize(m_);
    slack_lo_.resize(m_);
    slack_up_.resize(m_);
    for (int i = 0; i < m_; ++i) {
        const RowDef& r = model.rows()[i];
        rhs_[i] = r.rhs;
        for (const auto& t : r.terms) cols_[t.var].emplace_back(i, t.coef);
        // row + slack == rhs
        cols_[n_struct_ + i].emplace_back(i, 1.0);
        switch (r.sense) {
            case Sense::LE: slack_lo_[i] = 0.0; slack_up_[i] = kInf; break;
            case Sense::GE: slack_lo_[i] = -kInf; slack_up_[i] = 0.0; break;
            case Sense::EQ: slack_lo_[i] = 0.0; slack_up_[i] = 0.0; break;
        }
    }
    // merge duplicate coefficients within a column (same row listed twice)
    for (auto& col : cols_) {
        std::sort(col.begin(), col.end());
        std::size_t w = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (w > 0 && col[w - 1].first == col[r].first)
                col[w - 1].second += col[r].second;
            else
                col[w++] = col[r];
        }
        col.resize(w);
    }
}

double SimplexSolver::nonbasic_value(int j) const {
    switch (state_[j]) {
        case AT_LO: return lob(j);
        case AT_UP: return upb(j);
        case AT_ZERO: return 0.0;
        default: return 0.0;  // basic handled elsewhere
    }
}

void SimplexSolver::reset_to_slack_basis() {
    basic_.resize(m_);
    state_.assign(n_cols_, AT_LO);
    for (int j = 0; j < n_struct_; ++j) {
        const double l = lob(j), u = upb(j);
        if (std::isfinite(l))
            state_[j] = AT_LO;
        else if (std::isfinite(u))
            state_[j] = AT_UP;
        else
            state_[j] = AT_ZERO;
    }
    for (int i = 0; i < m_; ++i) {
        basic_[i] = n_struct_ + i;
        state_[n_struct_ + i] = BASIC;
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
}

bool SimplexSolver::factorize() {
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> a(mm * mm, 0.0);
    for (int k = 0; k < m_; ++k)
        for (const auto& [row, coef] : cols_[basic_[k]]) a[static_cast<std::size_t>(row) * mm + k] = coef;
    binv_.assign(mm * mm, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * mm + i] = 1.0;

    for (int c = 0; c < m_; ++c) {
        int piv = -1;
        double best = 1e-11;
        for (int r = c; r < m_; ++r) {
            const double v = std::abs(a[static_cast<std::size_t>(r) * mm + c]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (piv < 0) return false;
        if (piv != c) {
            for (int k = 0; k < m_; ++k) {
                std::swap(a[static_cast<std::size_t>(piv) * mm + k], a[static_cast<std::size_t>(c) * mm + k]);
                std::swap(binv_[static_cast<std::size_t>(piv) * mm + k],
                          binv_[static_cast<std::size_t>(c) * mm + k]);
            }
        }
        const double d = 1.0 / a[static_cast<std::size_t>(c) * mm + c];
        for (int k = 0; k < m_; ++k) {
            a[static_cast<std::size_t>(c) * mm + k] *= d;
            binv_[static_cast<std::size_t>(c) * mm + k] *= d;
        }
        for (int r = 0; r < m_; ++r) {
            if (r == c) continue;
            const double f = a[static_cast<std::size_t>(r) * mm + c];
            if (f == 0.0) continue;
            for (int k = 0; k < m_; ++k) {
                a[static_cast<std::size_t>(r) * mm + k] -= f * a[static_cast<std::size_t>(c) * mm + k];
                binv_[static_cast<std::size_t>(r) * mm + k] -= f * binv_[static_cast<std::size_t>(c) * mm + k];
            }
        }
    }
    return true;
}

void SimplexSolver::compute_xb() {
    std::vector<double> r = rhs_;
    for (int j = 0; j < n_cols_; ++j) {
        if (state_[j] == BASIC) continue;
        const double v = nonbasic_value(j);
        if (v == 0.0) continue;
        for (const auto& [row, coef] : cols_[j]) r[row] -= coef * v;
    }
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
        const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
        double s = 0.0;
        for (int k = 0; k < m_; ++k) s += bi[k] * r[k];
        xb_[i] = s;
    }
}

void SimplexSolver::ftran(int col, std::vector<double>& w) const {
    w.assign(m_, 0.0);
    for (const auto& [row, coef] : cols_[col])
        for (int i = 0; i < m_; ++i) w[i] += binv_[static_cast<std::size_t>(i) * m_ + row] * coef;
}

void SimplexSolver::pivot_update(int r, const std::vector<double>& w) {
    double* br = &binv_[static_cast<std::size_t>(r) * m_];
    const double inv = 1.0 / w[r];
    for (int k = 0; k < m_; ++k) br[k] *= inv;
    for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        const double f = w[i];
        if (f == 0.0) continue;
        double* bi = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) bi[k] -= f * br[k];
    }
}

bool SimplexSolver::run_phase(bool phase1, long iter_cap, LpStatus& status_out) {
    std::vector<double> y(m_), w;
    std::vector<double> cb(m_);
    int since_refactor = 0;

    for (;;) {
        if (iters_ > iter_cap) {
            status_out = LpStatus::IterLimit;
            return false;
        }

        double infeas = 0.0;
        if (phase1) {
            for (int i = 0; i < m_; ++i) {
                const int j = basic_[i];
                if (xb_[i] < lob(j) - kFeasTol) {
                    cb[i] = -1.0;
                    infeas += lob(j) - xb_[i];
                } else if (xb_[i] > upb(j) + kFeasTol) {
                    cb[i] = 1.0;
                    infeas += xb_[i] - upb(j);
                } else {
                    cb[i] = 0.0;
                }
            }
            if (infeas <= kFeasTol) {
                status_out = LpStatus::Optimal;  // phase 1 done: primal feasible
                return true;
            }
        } else {
            for (int i = 0; i < m_; ++i) cb[i] = cost(basic_[i]);
        }

        // y = cb' * Binv
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += cb[k] * binv_[static_cast<std::size_t>(k) * m_ + i];
            y[i] = s;
        }

        // pricing
        int q = -1;
        int dir = 0;
        double best_score = kCostTol;
        for (int j = 0; j < n_cols_; ++j) {
            if (state_[j] == BASIC) continue;
            if (lob(j) == upb(j)) continue;  // fixed, cannot move
            double d = phase1 ? 0.0 : cost(j);
            for (const auto& [row, coef] : cols_[j]) d -= y[row] * coef;
            int cand_dir = 0;
            double score = 0.0;
            if ((state_[j] == AT_LO || state_[j] == AT_ZERO) && d < -kCostTol) {
                cand_dir = +1;
                score = -d;
            }
            if ((state_[j] == AT_UP || state_[j] == AT_ZERO) && d > kCostTol && score < d) {
                cand_dir = -1;
                score = d;
            }
            if (cand_dir == 0) continue;
            if (bland_) {  // first eligible index
                q = j;
                dir = cand_dir;
                break;
            }
            if (score > best_score) {
                best_score = score;
                q = j;
                dir = cand_dir;
            }
        }
        if (q < 0) {
            // no improving direction: phase-1 optimum with residual
            // infeasibility proves the LP infeasible
            if (phase1) {
                status_out = LpStatus::Infeasible;
                return false;
            }
            status_out = LpStatus::Optimal;
            return true;
        }

        ftran(q, w);

        // ratio test: entering moves t >= 0 in direction dir; basic i changes
        // at rate -dir*w[i].
        double t_best = kInf;
        int leave = -1;
        unsigned char leave_state = AT_LO;
        for (int i = 0; i < m_; ++i) {
            if (std::abs(w[i]) < kPivotTol) continue;
            const double deriv = -dir * w[i];
            const int j = basic_[i];
            const double l = lob(j), u = upb(j), xv = xb_[i];
            double t_i = kInf;
            unsigned char target = AT_LO;
            if (phase1 && xv < l - kFeasTol) {
                // infeasible below its lower bound: blocks when climbing back to it
                if (deriv > kPivotTol) {
                    t_i = (l - xv) / deriv;
                    target = AT_LO;
                } else {
                    continue;
                }
            } else if (phase1 && xv > u + kFeasTol) {
                if (deriv < -kPivotTol) {
                    t_i = (u - xv) / deriv;
                    target = AT_UP;
                } else {
                    continue;
                }
            } else if (deriv < -kPivotTol && std::isfinite(l)) {
                t_i = (xv - l) / (-deriv);
                target = AT_LO;
            } else if (deriv > kPivotTol && std::isfinite(u)) {
                t_i = (u - xv) / deriv;
                target = AT_UP;
            } else {
                continue;
            }
            t_i = std::max(t_i, 0.0);
            bool take = false;
            if (leave < 0 || t_i < t_best - 1e-12) {
                take = true;
            } else if (t_i < t_best + 1e-12) {
                // tie: Bland picks the smallest variable id, otherwise the
                // largest pivot magnitude for stability
                take = bland_ ? basic_[i] < basic_[leave] : std::abs(w[i]) > std::abs(w[leave]);
            }
            if (take) {
                t_best = std::min(t_best, t_i);
                leave = i;
                leave_state = target;
            }
        }

        // entering variable's own bound flip
        const double range = upb(q) - lob(q);
        if (std::isfinite(range) && range <= t_best + 1e-12 && state_[q] != AT_ZERO) {
            // bound flip, no basis change
            const double t = range;
            for (int i = 0; i < m_; ++i) xb_[i] -= dir * t * w[i];
            state_[q] = (state_[q] == AT_LO) ? AT_UP : AT_LO;
            ++iters_;
            continue;
        }
        if (leave < 0) {
            status_out = phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;
            return false;
        }

        // pivot: q enters, basic_[leave] exits at leave_state
        const double enter_val = nonbasic_value(q) + dir * t_best;
        for (int i = 0; i < m_; ++i) xb_[i] -= dir * t_best * w[i];
        state_[basic_[leave]] = leave_state;
        state_[q] = BASIC;
        basic_[leave] = q;
        pivot_update(leave, w);
        xb_[leave] = enter_val;
        ++iters_;

        if (++since_refactor >= kRefactorEvery) {
            since_refactor = 0;
            if (!factorize()) {
                status_out = LpStatus::IterLimit;  // caller retries cold
                return false;
            }
            compute_xb();
        }
    }
}

LpResult SimplexSolver::solve(const std::vector<double>& lo, const std::vector<double>& up, Basis* warm) {
    lo_ = &lo;
    up_ = &up;
    iters_ = 0;
    bland_ = false;

    LpResult res;
    if (m_ == 0 && n_struct_ == 0) {
        res.status = LpStatus::Optimal;
        res.objective = 0.0;
        return res;
    }

    bool started_warm = false;
    if (warm && static_cast<int>(warm->basic.size()) == m_ &&
        static_cast<int>(warm->state.size()) == n_cols_) {
        basic_ = warm->basic;
        state_ = warm->state;
        // nonbasic states may conflict with changed bounds (e.g. AT_UP on +inf)
        for (int j = 0; j < n_cols_; ++j) {
            if (state_[j] == BASIC) continue;
            if (state_[j] == AT_LO && !std::isfinite(lob(j)))
                state_[j] = std::isfinite(upb(j)) ? AT_UP : AT_ZERO;
            else if (state_[j] == AT_UP && !std::isfinite(upb(j)))
                state_[j] = std::isfinite(lob(j)) ? AT_LO : AT_ZERO;
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        started_warm = factorize();
    }
    if (!started_warm) reset_to_slack_basis();
    compute_xb();

    const long cap_normal = 2000 + 40L * n_cols_;
    const long cap_total = 4000 + 400L * n_cols_;
    bool solved = false;

    // attempt 0: current (possibly warm) basis; attempt 1: cold Bland restart
    for (int attempt = 0; attempt < 2 && !solved; ++attempt) {
        if (attempt == 1) {
            bland_ = true;
            reset_to_slack_basis();
            compute_xb();
        }
        LpStatus st = LpStatus::Optimal;
        if (!run_phase(true, bland_ ? cap_total : cap_normal, st)) {
            // an infeasibility certificate from a fresh cold basis is final;
            // anything reached from a warm basis gets one cold retry
            if (st == LpStatus::Infeasible && (attempt == 1 || !started_warm)) {
                res.status = LpStatus::Infeasible;
                res.iterations = iters_;
                return res;
            }
            continue;
        }
        if (!run_phase(false, bland_ ? cap_total : cap_normal, st)) {
            if (st == LpStatus::Unbounded) {
                res.status = LpStatus::Unbounded;
                res.iterations = iters_;
                return res;
            }
            continue;
        }
        solved = true;
    }
    if (!solved) {
        res.status = LpStatus::IterLimit;
        res.iterations = iters_;
        return res;
    }
    res.status = LpStatus::Optimal;
    if (factorize()) compute_xb();  // refresh to limit accumulated drift

    // assemble structural solution
    res.x.assign(n_struct_, 0.0);
    for (int j = 0; j < n_struct_; ++j)
        if (state_[j] != BASIC) res.x[j] = nonbasic_value(j);
    for (int i = 0; i < m_; ++i)
        if (basic_[i] < n_struct_) res.x[basic_[i]] = xb_[i];
    double objective = 0.0;
    for (int j = 0; j < n_struct_; ++j) objective += obj_[j] * res.x[j];
    res.objective = objective;
    res.iterations = iters_;

    if (warm) {
        warm->basic = basic_;
        warm->state = state_;
    }
    return res;
}

}  // namespace aam::milp::detail
