#include "aam/milp.hpp"

#include <cmath>
#include <sstream>

namespace aam::milp {

int MilpModel::add_var(const std::string& name, double lo, double up, double obj, bool integral) {
    if (lo > up) throw ConfigError("variable " + name + ": lower bound exceeds upper bound");
    vars_.push_back({name, lo, up, obj, integral});
    return static_cast<int>(vars_.size()) - 1;
}

int MilpModel::add_row(std::vector<LinTerm> terms, Sense sense, double rhs, const std::string& name) {
    for (const auto& t : terms)
        if (t.var < 0 || t.var >= n_vars())
            throw ConfigError("constraint " + name + " references undeclared variable");
    rows_.push_back({name, std::move(terms), sense, rhs});
    return static_cast<int>(rows_.size()) - 1;
}

void MilpModel::set_bounds(int var, double lo, double up) {
    if (var < 0 || var >= n_vars()) throw ConfigError("set_bounds: unknown variable");
    if (lo > up) throw ConfigError("variable " + vars_[var].name + ": lower bound exceeds upper bound");
    vars_[var].lo = lo;
    vars_[var].up = up;
}

std::pair<double, double> MilpModel::expr_box(const LinExpr& e) const {
    double lo = e.constant, up = e.constant;
    for (const auto& t : e.terms) {
        const VarDef& v = vars_[t.var];
        if (t.coef > 0.0) {
            lo += t.coef * v.lo;
            up += t.coef * v.up;
        } else {
            lo += t.coef * v.up;
            up += t.coef * v.lo;
        }
    }
    return {lo, up};
}

void MilpModel::validate() const {
    for (const auto& v : vars_)
        if (v.lo > v.up) throw ConfigError("variable " + v.name + ": lower bound exceeds upper bound");
    for (const auto& r : rows_)
        for (const auto& t : r.terms)
            if (t.var < 0 || t.var >= n_vars())
                throw ConfigError("constraint " + r.name + " references undeclared variable");
}

std::vector<int> add_big_m_indicator(MilpModel& model, int guard, const LinExpr& expr, Sense sense,
                                     double big_m) {
    if (guard < 0 || guard >= model.n_vars()) throw ConfigError("big-M indicator: unknown guard variable");
    const VarDef& g = model.var(guard);
    if (!g.integral || g.lo < 0.0 || g.up > 1.0)
        throw ConfigError("big-M indicator: guard must be a binary variable");
    auto [lo, up] = model.expr_box(expr);
    if (!std::isfinite(lo) || !std::isfinite(up))
        throw ConfigError("big-M indicator: expression is unbounded over the variable box");
    const double needed = std::max(std::abs(lo), std::abs(up));
    if (big_m < needed - 1e-9)
        throw ConfigError("big-M indicator: M=" + std::to_string(big_m) +
                          " below box-derived bound " + std::to_string(needed));

    std::vector<int> ids;
    if (sense == Sense::GE || sense == Sense::EQ) {
        // guard=1 -> terms + k >= 0, relaxed by M when guard=0:
        //   terms - M*guard >= -M - k
        std::vector<LinTerm> row = expr.terms;
        row.push_back({guard, -big_m});
        ids.push_back(model.add_row(std::move(row), Sense::GE, -big_m - expr.constant));
    }
    if (sense == Sense::LE || sense == Sense::EQ) {
        //   terms + M*guard <= M - k
        std::vector<LinTerm> row = expr.terms;
        row.push_back({guard, big_m});
        ids.push_back(model.add_row(std::move(row), Sense::LE, big_m - expr.constant));
    }
    return ids;
}

std::vector<int> add_indicator(MilpModel& model, int guard, bool active_value, const LinExpr& expr,
                               Sense sense) {
    auto [lo, up] = model.expr_box(expr);
    if (!std::isfinite(lo) || !std::isfinite(up))
        throw ConfigError("indicator: expression is unbounded over the variable box");
    const double m = std::max(std::abs(lo), std::abs(up));
    if (active_value) return add_big_m_indicator(model, guard, expr, sense, m);

    // guard=0 active: expr >= -M*guard  /  expr <= M*guard
    std::vector<int> ids;
    if (sense == Sense::GE || sense == Sense::EQ) {
        std::vector<LinTerm> row = expr.terms;
        row.push_back({guard, m});
        ids.push_back(model.add_row(std::move(row), Sense::GE, -expr.constant));
    }
    if (sense == Sense::LE || sense == Sense::EQ) {
        std::vector<LinTerm> row = expr.terms;
        row.push_back({guard, -m});
        ids.push_back(model.add_row(std::move(row), Sense::LE, -expr.constant));
    }
    return ids;
}

bool check_solution(const MilpModel& model, const std::vector<double>& x, double feas_tol,
                    double int_tol) {
    if (static_cast<int>(x.size()) != model.n_vars()) return false;
    for (int j = 0; j < model.n_vars(); ++j) {
        const VarDef& v = model.var(j);
        if (x[j] < v.lo - feas_tol || x[j] > v.up + feas_tol) return false;
        if (v.integral && std::abs(x[j] - std::round(x[j])) > int_tol) return false;
    }
    for (const auto& r : model.rows()) {
        double lhs = 0.0;
        double scale = 1.0;
        for (const auto& t : r.terms) {
            lhs += t.coef * x[t.var];
            scale = std::max(scale, std::abs(t.coef * x[t.var]));
        }
        const double tol = feas_tol * scale;
        switch (r.sense) {
            case Sense::LE:
                if (lhs > r.rhs + tol) return false;
                break;
            case Sense::GE:
                if (lhs < r.rhs - tol) return false;
                break;
            case Sense::EQ:
                if (std::abs(lhs - r.rhs) > tol) return false;
                break;
        }
    }
    return true;
}

std::string MilpModel::to_lp_format() const {
    std::ostringstream out;
    auto vname = [&](int j) {
        return vars_[j].name.empty() ? "x" + std::to_string(j) : vars_[j].name;
    };
    out << "Minimize\n obj:";
    for (int j = 0; j < n_vars(); ++j)
        if (vars_[j].obj != 0.0)
            out << (vars_[j].obj >= 0 ? " + " : " - ") << std::abs(vars_[j].obj) << " " << vname(j);
    if (obj_offset_ != 0.0) out << (obj_offset_ >= 0 ? " + " : " - ") << std::abs(obj_offset_);
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const RowDef& r = rows_[i];
        out << " " << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ":";
        for (const auto& t : r.terms)
            out << (t.coef >= 0 ? " + " : " - ") << std::abs(t.coef) << " " << vname(t.var);
        out << (r.sense == Sense::LE ? " <= " : r.sense == Sense::GE ? " >= " : " = ") << r.rhs << "\n";
    }
    out << "Bounds\n";
    for (int j = 0; j < n_vars(); ++j) {
        out << " ";
        if (vars_[j].lo == -kInf)
            out << "-inf";
        else
            out << vars_[j].lo;
        out << " <= " << vname(j) << " <= ";
        if (vars_[j].up == kInf)
            out << "+inf";
        else
            out << vars_[j].up;
        out << "\n";
    }
    out << "Generals\n";
    for (int j = 0; j < n_vars(); ++j)
        if (vars_[j].integral) out << " " << vname(j);
    out << "\nEnd\n";
    return out.str();
}

}  // namespace aam::milp
