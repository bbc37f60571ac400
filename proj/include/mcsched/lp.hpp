#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcsched/errors.hpp"

namespace mcsched {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, GreaterEq, Equal };

struct LpRow {
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
    std::string name;
};

/// A linear program in maximization form: max c^T x subject to the rows and
/// the variable bounds. Bounds may be infinite on either side.
struct LpProblem {
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::string> var_names;
    std::vector<LpRow> rows;
    std::string name = "lp";

    int num_vars() const { return static_cast<int>(objective.size()); }

    int add_var(double lb, double ub, double obj, std::string var_name = "") {
        const int id = num_vars();
        objective.push_back(obj);
        lower.push_back(lb);
        upper.push_back(ub);
        if (var_name.empty()) var_name = "x" + std::to_string(id);
        var_names.push_back(std::move(var_name));
        return id;
    }

    void add_row(std::vector<std::pair<int, double>> terms, Relation rel, double rhs,
                 std::string row_name = "") {
        if (row_name.empty()) row_name = "r" + std::to_string(rows.size());
        rows.push_back(LpRow{std::move(terms), rel, rhs, std::move(row_name)});
    }

    void validate() const {
        const int n = num_vars();
        if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
            throw InputError("bound arrays must match the variable count");
        for (int j = 0; j < n; ++j) {
            if (std::isnan(lower[j]) || std::isnan(upper[j]) || std::isnan(objective[j]))
                throw InputError("variable " + std::to_string(j) + " has a NaN field");
            if (std::isinf(objective[j]))
                throw InputError("variable " + std::to_string(j) +
                                 " has an infinite objective coefficient");
        }
        for (const auto& row : rows) {
            if (!std::isfinite(row.rhs))
                throw InputError("row " + row.name + " has a non-finite right-hand side");
            for (const auto& [j, a] : row.terms) {
                if (j < 0 || j >= n)
                    throw InputError("row " + row.name + " references unknown variable " +
                                     std::to_string(j));
                if (!std::isfinite(a))
                    throw InputError("row " + row.name + " has a non-finite coefficient");
            }
        }
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterLimit: return "iteration_limit";
    }
    return "unknown";
}

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    // Row duals follow the maximization convention: nonnegative on <= rows,
    // nonpositive on >= rows, free on equalities.
    std::vector<double> row_duals;
    std::vector<double> reduced_costs;
    int iterations = 0;
};

struct LpOptions {
    double feas_tol = 1e-7;  // relative feasibility tolerance
    double opt_tol = 1e-9;   // reduced-cost optimality tolerance
    int max_iters = 0;       // 0 picks a size-based default
    int bland_after = 100;   // consecutive degenerate pivots before Bland's rule
};

namespace detail {

/// Primal simplex over an explicit dense tableau, with general variable
/// bounds. Nonbasic variables rest at a bound (or at zero when free); rows
/// carry one slack each whose bounds encode the relation; infeasible starts
/// get phase-1 artificials. Pivot selection is deterministic: steepest
/// reduced cost with smallest-index ties, falling back to Bland's rule after
/// a run of degenerate steps so cycling cannot persist.
class Simplex {
public:
    Simplex(const LpProblem& p, const LpOptions& opt) : prob_(p), opt_(opt) {
        n_ = p.num_vars();
        m_ = static_cast<int>(p.rows.size());
    }

    LpSolution run() {
        prob_.validate();
        LpSolution sol;
        for (int j = 0; j < n_; ++j)
            if (prob_.lower[j] > prob_.upper[j]) {
                sol.status = LpStatus::Infeasible;
                return sol;
            }

        scale_rows();
        build_tableau();

        int iters_left = opt_.max_iters > 0 ? opt_.max_iters : 5000 + 200 * (n_ + m_);

        if (need_phase1_) {
            set_phase1_costs();
            const StepResult r = iterate(iters_left, /*phase1=*/true);
            if (r == StepResult::IterLimit) return finish(LpStatus::IterLimit);
            if (rows_violated()) return finish(LpStatus::Infeasible);
            freeze_artificials();
        }

        set_phase2_costs();
        const StepResult r = iterate(iters_left, /*phase1=*/false);
        if (r == StepResult::IterLimit) return finish(LpStatus::IterLimit);
        if (r == StepResult::Unbounded) return finish(LpStatus::Unbounded);
        return finish(LpStatus::Optimal);
    }

private:
    enum class ColState : char { Basic, AtLower, AtUpper, Free, Fixed };
    enum class StepResult { Optimal, Unbounded, IterLimit };

    const LpProblem& prob_;
    LpOptions opt_;
    int n_ = 0, m_ = 0;

    // scaled copies
    std::vector<double> row_scale_;        // per row, power of two
    double obj_scale_ = 1.0;               // power of two
    std::vector<std::vector<double>> a_;   // dense row-major coefficients
    std::vector<double> b_;

    // column space: structural | slacks | artificials
    int slack_begin_ = 0, art_begin_ = 0, total_ = 0;
    std::vector<double> lo_, hi_, cost_;
    std::vector<std::vector<double>> tab_;  // m_ rows, total_ columns (B^-1 A)
    std::vector<double> dcost_;             // reduced costs per column
    std::vector<double> beta_;              // values of basic variables
    std::vector<int> basis_;                // column occupying each row
    std::vector<int> in_basis_;             // row of a basic column, else -1
    std::vector<ColState> state_;
    bool need_phase1_ = false;
    int iterations_ = 0;

    static double pow2_floor(double v) {
        if (v <= 0.0 || !std::isfinite(v)) return 1.0;
        return std::exp2(static_cast<double>(std::ilogb(v)));
    }

    void scale_rows() {
        row_scale_.assign(m_, 1.0);
        a_.assign(m_, std::vector<double>(n_, 0.0));
        b_.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            const LpRow& row = prob_.rows[r];
            double mx = 0.0;
            for (const auto& [j, v] : row.terms) {
                a_[r][j] += v;
            }
            for (double v : a_[r]) mx = std::max(mx, std::abs(v));
            const double f = 1.0 / pow2_floor(mx);
            row_scale_[r] = f;
            for (double& v : a_[r]) v *= f;
            b_[r] = row.rhs * f;
        }
        double mc = 0.0;
        for (double c : prob_.objective) mc = std::max(mc, std::abs(c));
        obj_scale_ = 1.0 / pow2_floor(mc);
    }

    double bound_value(int j) const {
        switch (state_[j]) {
            case ColState::AtLower: return lo_[j];
            case ColState::AtUpper: return hi_[j];
            case ColState::Fixed: return lo_[j];
            case ColState::Free: return 0.0;
            case ColState::Basic: break;
        }
        return beta_[in_basis_[j]];
    }

    double value(int j) const { return bound_value(j); }

    void build_tableau() {
        slack_begin_ = n_;
        art_begin_ = n_ + m_;
        total_ = art_begin_;  // artificials appended on demand

        lo_.assign(art_begin_, 0.0);
        hi_.assign(art_begin_, 0.0);
        cost_.assign(art_begin_, 0.0);
        state_.assign(art_begin_, ColState::AtLower);
        in_basis_.assign(art_begin_, -1);

        for (int j = 0; j < n_; ++j) {
            lo_[j] = prob_.lower[j];
            hi_[j] = prob_.upper[j];
            if (lo_[j] == hi_[j]) {
                state_[j] = ColState::Fixed;
            } else if (std::isinf(lo_[j]) && std::isinf(hi_[j])) {
                state_[j] = ColState::Free;
            } else if (std::isinf(lo_[j])) {
                state_[j] = ColState::AtUpper;
            } else if (std::isinf(hi_[j])) {
                state_[j] = ColState::AtLower;
            } else {
                state_[j] = std::abs(lo_[j]) <= std::abs(hi_[j]) ? ColState::AtLower
                                                                 : ColState::AtUpper;
            }
        }
        for (int r = 0; r < m_; ++r) {
            const int s = slack_begin_ + r;
            switch (prob_.rows[r].rel) {
                case Relation::LessEq:
                    lo_[s] = 0.0;
                    hi_[s] = kInfinity;
                    break;
                case Relation::GreaterEq:
                    lo_[s] = -kInfinity;
                    hi_[s] = 0.0;
                    break;
                case Relation::Equal:
                    lo_[s] = 0.0;
                    hi_[s] = 0.0;
                    break;
            }
        }

        basis_.assign(m_, -1);
        beta_.assign(m_, 0.0);
        tab_.assign(m_, std::vector<double>());

        // residual each slack would have to absorb
        std::vector<double> resid(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double acc = b_[r];
            for (int j = 0; j < n_; ++j)
                if (state_[j] != ColState::Free) acc -= a_[r][j] * bound_value_initial(j);
            resid[r] = acc;
        }

        std::vector<int> art_rows;
        for (int r = 0; r < m_; ++r) {
            const int s = slack_begin_ + r;
            if (resid[r] >= lo_[s] && resid[r] <= hi_[s]) {
                basis_[r] = s;
                beta_[r] = resid[r];
                state_[s] = ColState::Basic;
                in_basis_[s] = r;
            } else {
                // park the slack at the bound nearest the residual and let an
                // artificial carry the remainder into phase 1
                const double at = std::abs(resid[r] - lo_[s]) <= std::abs(resid[r] - hi_[s])
                                      ? lo_[s]
                                      : hi_[s];
                state_[s] = (lo_[s] == hi_[s]) ? ColState::Fixed
                            : (at == lo_[s])   ? ColState::AtLower
                                               : ColState::AtUpper;
                art_rows.push_back(r);
            }
        }

        for (int r : art_rows) {
            const int s = slack_begin_ + r;
            const double slack_at = bound_value_initial_slack(s);
            const double t = resid[r] - slack_at;
            const int col = total_++;
            lo_.push_back(t >= 0.0 ? 0.0 : -kInfinity);
            hi_.push_back(t >= 0.0 ? kInfinity : 0.0);
            cost_.push_back(0.0);
            state_.push_back(ColState::Basic);
            in_basis_.push_back(r);
            basis_[r] = col;
            beta_[r] = t;
        }
        need_phase1_ = !art_rows.empty();

        for (int r = 0; r < m_; ++r) {
            tab_[r].assign(total_, 0.0);
            for (int j = 0; j < n_; ++j) tab_[r][j] = a_[r][j];
            tab_[r][slack_begin_ + r] = 1.0;
            if (basis_[r] >= art_begin_) tab_[r][basis_[r]] = 1.0;
        }
        dcost_.assign(total_, 0.0);
    }

    double bound_value_initial(int j) const {
        switch (state_[j]) {
            case ColState::AtLower:
            case ColState::Fixed: return lo_[j];
            case ColState::AtUpper: return hi_[j];
            default: return 0.0;
        }
    }
    double bound_value_initial_slack(int s) const { return bound_value_initial(s); }

    void set_phase1_costs() {
        // maximize the negated total infeasibility
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (int j = art_begin_; j < total_; ++j) cost_[j] = (lo_[j] == 0.0) ? -1.0 : 1.0;
        recompute_reduced_costs();
    }

    void set_phase2_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (int j = 0; j < n_; ++j) cost_[j] = prob_.objective[j] * obj_scale_;
        recompute_reduced_costs();
    }

    void freeze_artificials() {
        for (int j = art_begin_; j < total_; ++j) {
            lo_[j] = hi_[j] = 0.0;
            if (state_[j] != ColState::Basic) state_[j] = ColState::Fixed;
        }
    }

    /// Row-balance audit of the current point, per row and in that row's own
    /// scale, so leftover phase-1 infeasibility cannot hide behind a small
    /// equilibration factor. Slacks are the structural residual carriers;
    /// whatever the artificials still hold shows up as imbalance here.
    bool rows_violated() const {
        for (int r = 0; r < m_; ++r) {
            double act = 0.0;
            for (int j = 0; j < n_; ++j)
                if (a_[r][j] != 0.0) act += a_[r][j] * value(j);
            act += value(slack_begin_ + r);
            const double resid = std::abs(b_[r] - act);
            if (resid > opt_.feas_tol * std::max(1.0, std::abs(b_[r]))) return true;
        }
        return false;
    }

    void recompute_reduced_costs() {
        for (int j = 0; j < total_; ++j) {
            double d = cost_[j];
            for (int r = 0; r < m_; ++r) {
                const double cb = cost_[basis_[r]];
                if (cb != 0.0) d -= cb * tab_[r][j];
            }
            dcost_[j] = d;
        }
        for (int r = 0; r < m_; ++r) dcost_[basis_[r]] = 0.0;
    }

    bool eligible(int j, int& direction) const {
        switch (state_[j]) {
            case ColState::Basic:
            case ColState::Fixed: return false;
            case ColState::AtLower:
                if (dcost_[j] > opt_.opt_tol) { direction = +1; return true; }
                return false;
            case ColState::AtUpper:
                if (dcost_[j] < -opt_.opt_tol) { direction = -1; return true; }
                return false;
            case ColState::Free:
                if (std::abs(dcost_[j]) > opt_.opt_tol) {
                    direction = dcost_[j] > 0.0 ? +1 : -1;
                    return true;
                }
                return false;
        }
        return false;
    }

    StepResult iterate(int& iters_left, bool phase1) {
        int degenerate_run = 0;
        while (true) {
            if (iters_left <= 0) return StepResult::IterLimit;

            // pricing
            int q = -1, dir = 0;
            if (degenerate_run < opt_.bland_after) {
                double best = 0.0;
                for (int j = 0; j < total_; ++j) {
                    int d = 0;
                    if (!eligible(j, d)) continue;
                    const double score = std::abs(dcost_[j]);
                    if (score > best) {
                        best = score;
                        q = j;
                        dir = d;
                    }
                }
            } else {
                for (int j = 0; j < total_; ++j) {
                    int d = 0;
                    if (eligible(j, d)) { q = j; dir = d; break; }
                }
            }
            if (q < 0) return StepResult::Optimal;

            --iters_left;
            ++iterations_;

            // ratio test: entering variable moves by t in direction dir
            const double pivot_tol = 1e-10;
            double t_limit = kInfinity;
            int leave_row = -1;
            double range = hi_[q] - lo_[q];  // flip distance, may be inf
            if (std::isnan(range)) range = kInfinity;
            for (int r = 0; r < m_; ++r) {
                const double y = tab_[r][q];
                if (std::abs(y) <= pivot_tol) continue;
                const int bcol = basis_[r];
                const double step = dir * y;
                double cap;
                if (step > 0.0) {  // basic value decreases toward its lower bound
                    if (std::isinf(lo_[bcol])) continue;
                    cap = (beta_[r] - lo_[bcol]) / step;
                } else {  // increases toward its upper bound
                    if (std::isinf(hi_[bcol])) continue;
                    cap = (beta_[r] - hi_[bcol]) / step;
                }
                if (cap < 0.0) cap = 0.0;  // tolerate slightly out-of-bound basics
                if (leave_row < 0 || cap < t_limit - 1e-12) {
                    t_limit = cap;
                    leave_row = r;
                } else if (cap <= t_limit + 1e-12) {
                    // near-tie: keep the tighter limit, and leave by the
                    // smallest basic index so the fallback rule terminates
                    if (cap < t_limit) t_limit = cap;
                    if (basis_[r] < basis_[leave_row]) leave_row = r;
                }
            }

            if (std::isinf(t_limit) && std::isinf(range)) {
                if (phase1)
                    throw SolverStallError("phase 1 detected an unbounded ray");
                return StepResult::Unbounded;
            }

            if (range <= t_limit) {
                // bound flip, basis unchanged
                const double delta = dir * range;
                for (int r = 0; r < m_; ++r)
                    if (tab_[r][q] != 0.0) beta_[r] -= delta * tab_[r][q];
                state_[q] = (state_[q] == ColState::AtLower) ? ColState::AtUpper
                                                             : ColState::AtLower;
                if (range > 1e-12) degenerate_run = 0; else ++degenerate_run;
                continue;
            }

            const double t = t_limit;
            const int leave_col = basis_[leave_row];
            const double enter_val = bound_value(q) + dir * t;

            for (int r = 0; r < m_; ++r)
                if (r != leave_row) beta_[r] -= t * dir * tab_[r][q];

            // leaving variable lands on the bound that blocked the step
            const double y_leave = tab_[leave_row][q];
            if (lo_[leave_col] == hi_[leave_col]) state_[leave_col] = ColState::Fixed;
            else if (dir * y_leave > 0.0) state_[leave_col] = ColState::AtLower;
            else state_[leave_col] = ColState::AtUpper;
            in_basis_[leave_col] = -1;

            pivot(leave_row, q);
            basis_[leave_row] = q;
            beta_[leave_row] = enter_val;
            state_[q] = ColState::Basic;
            in_basis_[q] = leave_row;

            if (t > 1e-12) degenerate_run = 0; else ++degenerate_run;
        }
    }

    void pivot(int r, int q) {
        std::vector<double>& prow = tab_[r];
        const double inv = 1.0 / prow[q];
        for (int j = 0; j < total_; ++j) prow[j] *= inv;
        prow[q] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = tab_[i][q];
            if (f == 0.0) continue;
            std::vector<double>& row = tab_[i];
            for (int j = 0; j < total_; ++j) row[j] -= f * prow[j];
            row[q] = 0.0;
        }
        const double fd = dcost_[q];
        if (fd != 0.0) {
            for (int j = 0; j < total_; ++j) dcost_[j] -= fd * prow[j];
            dcost_[q] = 0.0;
        }
    }

    LpSolution finish(LpStatus status) {
        LpSolution sol;
        sol.status = status;
        sol.iterations = iterations_;
        if (status != LpStatus::Optimal) return sol;

        sol.x.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j) {
            double v = value(j);
            // snap values that drifted marginally outside their box
            if (std::isfinite(lo_[j])) v = std::max(v, lo_[j]);
            if (std::isfinite(hi_[j])) v = std::min(v, hi_[j]);
            sol.x[j] = v;
        }
        double z = 0.0;
        for (int j = 0; j < n_; ++j) z += prob_.objective[j] * sol.x[j];
        sol.objective = z;

        sol.reduced_costs.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = dcost_[j] / obj_scale_;
        sol.row_duals.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r)
            sol.row_duals[r] = -dcost_[slack_begin_ + r] * row_scale_[r] / obj_scale_;
        return sol;
    }
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {}) {
    detail::Simplex s(problem, options);
    return s.run();
}

struct SolutionCheck {
    bool ok = true;
    double max_violation = 0.0;
    std::vector<std::string> violations;
};

/// Feasibility audit of a candidate point against bounds and rows, with a
/// relative tolerance per row.
inline SolutionCheck check_solution(const LpProblem& problem, std::span<const double> x,
                                    double tol = 1e-7) {
    SolutionCheck out;
    if (static_cast<int>(x.size()) != problem.num_vars()) {
        out.ok = false;
        out.violations.push_back("point has wrong dimension");
        return out;
    }
    auto record = [&out](double viol, const std::string& what) {
        out.max_violation = std::max(out.max_violation, viol);
        out.ok = false;
        out.violations.push_back(what);
    };
    for (int j = 0; j < problem.num_vars(); ++j) {
        const double scale = std::max({1.0, std::abs(problem.lower[j]) == kInfinity ? 0.0 : std::abs(problem.lower[j]),
                                       std::abs(problem.upper[j]) == kInfinity ? 0.0 : std::abs(problem.upper[j])});
        if (x[j] < problem.lower[j] - tol * scale)
            record(problem.lower[j] - x[j],
                   problem.var_names[j] + " below its lower bound");
        if (x[j] > problem.upper[j] + tol * scale)
            record(x[j] - problem.upper[j],
                   problem.var_names[j] + " above its upper bound");
    }
    for (const LpRow& row : problem.rows) {
        double act = 0.0, mag = 0.0;
        for (const auto& [j, a] : row.terms) {
            act += a * x[j];
            mag += std::abs(a * x[j]);
        }
        const double scale = std::max({1.0, std::abs(row.rhs), mag});
        const double slack = row.rhs - act;
        double viol = 0.0;
        switch (row.rel) {
            case Relation::LessEq: viol = -slack; break;
            case Relation::GreaterEq: viol = slack; break;
            case Relation::Equal: viol = std::abs(slack); break;
        }
        if (viol > tol * scale) record(viol, "row " + row.name + " violated by " +
                                                 std::to_string(viol));
    }
    return out;
}

namespace detail {

inline void append_terms(std::ostringstream& os,
                         const std::vector<std::pair<int, double>>& terms,
                         const std::vector<std::string>& names) {
    bool first = true;
    for (const auto& [j, a] : terms) {
        if (a == 0.0) continue;
        if (first) {
            if (a < 0.0) os << "- ";
            first = false;
        } else {
            os << (a < 0.0 ? " - " : " + ");
        }
        const double mag = std::abs(a);
        if (mag != 1.0) os << mag << ' ';
        os << names[j];
    }
    if (first) os << '0';
}

}  // namespace detail

/// Renders the problem in LP interchange format, readable by common solvers.
inline std::string dump(const LpProblem& problem) {
    std::ostringstream os;
    os.precision(17);
    os << "\\ " << problem.name << "\n";
    os << "Maximize\n obj: ";
    {
        std::vector<std::pair<int, double>> terms;
        for (int j = 0; j < problem.num_vars(); ++j)
            if (problem.objective[j] != 0.0) terms.emplace_back(j, problem.objective[j]);
        detail::append_terms(os, terms, problem.var_names);
    }
    os << "\nSubject To\n";
    for (const LpRow& row : problem.rows) {
        os << ' ' << row.name << ": ";
        detail::append_terms(os, row.terms, problem.var_names);
        switch (row.rel) {
            case Relation::LessEq: os << " <= "; break;
            case Relation::GreaterEq: os << " >= "; break;
            case Relation::Equal: os << " = "; break;
        }
        os << row.rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < problem.num_vars(); ++j) {
        const double lo = problem.lower[j], hi = problem.upper[j];
        const std::string& nm = problem.var_names[j];
        if (std::isinf(lo) && std::isinf(hi)) {
            os << ' ' << nm << " free\n";
        } else if (std::isinf(lo)) {
            os << ' ' << nm << " <= " << hi << "\n";
        } else if (std::isinf(hi)) {
            os << ' ' << nm << " >= " << lo << "\n";
        } else if (lo == hi) {
            os << ' ' << nm << " = " << lo << "\n";
        } else {
            os << ' ' << lo << " <= " << nm << " <= " << hi << "\n";
        }
    }
    os << "End\n";
    return os.str();
}

}  // namespace mcsched
