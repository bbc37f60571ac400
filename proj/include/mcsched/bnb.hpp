#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

#include "mcsched/errors.hpp"
#include "mcsched/lp.hpp"

namespace mcsched {

/// A mixed-integer program: the embedded LP plus the set of variables that
/// must take integral values.
struct MilpProblem {
    LpProblem lp;
    std::vector<int> integer_vars;

    void validate() const {
        lp.validate();
        for (int j : integer_vars)
            if (j < 0 || j >= lp.num_vars())
                throw InputError("integer variable index " + std::to_string(j) +
                                 " out of range");
    }
};

/// Drops the integrality requirements.
inline LpProblem relax(const MilpProblem& p) { return p.lp; }

enum class MilpStatus {
    Optimal,
    Infeasible,
    LimitFeasible,  // stopped at a limit with an incumbent in hand
    LimitUnknown,   // stopped at a limit before finding any integral point
};

inline const char* to_string(MilpStatus s) {
    switch (s) {
        case MilpStatus::Optimal: return "optimal";
        case MilpStatus::Infeasible: return "infeasible";
        case MilpStatus::LimitFeasible: return "limit_feasible";
        case MilpStatus::LimitUnknown: return "limit_unknown";
    }
    return "unknown";
}

struct MilpSolution {
    MilpStatus status = MilpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    double best_bound = -kInfinity;  // value no integral point can exceed
    long node_count = 0;             // LP relaxations solved, root included
};

struct MilpOptions {
    double int_tol = 1e-6;          // how far from an integer still counts as integral
    long max_nodes = 0;             // 0: unlimited
    double time_limit_seconds = 0;  // 0: unlimited
    LpOptions lp;
};

namespace detail {

struct BnbNode {
    int parent = -1;
    int var = -1;        // variable whose bound this node tightens
    bool is_upper = false;
    double bound_value = 0.0;
    double lp_bound = kInfinity;
};

class BranchAndBound {
public:
    BranchAndBound(const MilpProblem& p, const MilpOptions& opt) : prob_(p), opt_(opt) {}

    MilpSolution run() {
        prob_.validate();
        work_ = prob_.lp;
        root_lower_ = prob_.lp.lower;
        root_upper_ = prob_.lp.upper;

        const auto t0 = std::chrono::steady_clock::now();
        auto out_of_time = [&] {
            if (opt_.time_limit_seconds <= 0) return false;
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            return dt.count() >= opt_.time_limit_seconds;
        };

        MilpSolution sol;
        bool have_incumbent = false;
        double incumbent = -kInfinity;
        std::vector<double> incumbent_x;

        nodes_.push_back(BnbNode{});  // root carries no bound change

        // best bound first; FIFO among equal bounds keeps the search
        // deterministic
        struct QEntry {
            double bound;
            long seq;
            int node;
        };
        auto worse = [](const QEntry& a, const QEntry& b) {
            if (a.bound != b.bound) return a.bound < b.bound;
            return a.seq > b.seq;
        };
        std::priority_queue<QEntry, std::vector<QEntry>, decltype(worse)> queue(worse);
        long seq = 0;
        queue.push(QEntry{kInfinity, seq++, 0});

        long solved = 0;
        bool limit_hit = false;

        while (!queue.empty()) {
            const QEntry top = queue.top();
            if (have_incumbent && top.bound <= incumbent + 1e-9) break;  // nothing left to gain
            if ((opt_.max_nodes > 0 && solved >= opt_.max_nodes) || out_of_time()) {
                limit_hit = true;
                break;
            }
            queue.pop();

            apply_bounds(top.node);
            const LpSolution lp = solve_lp(work_, opt_.lp);
            ++solved;
            if (lp.status == LpStatus::Unbounded)
                throw DomainError("relaxation is unbounded; integral search is undefined");
            if (lp.status == LpStatus::IterLimit)
                throw SolverStallError("relaxation hit its iteration limit");
            if (lp.status == LpStatus::Infeasible) continue;
            if (have_incumbent && lp.objective <= incumbent + 1e-9) continue;

            const int frac = most_fractional(lp.x);
            if (frac < 0) {
                // integral point: fix the integer variables exactly and
                // re-solve so the reported objective comes from the exact
                // 0/1 values, not the relaxation's near-integers
                double confirmed;
                std::vector<double> xconf;
                if (confirm(lp.x, confirmed, xconf) &&
                    (!have_incumbent || confirmed > incumbent + 1e-9)) {
                    incumbent = confirmed;
                    incumbent_x = std::move(xconf);
                    have_incumbent = true;
                }
                continue;
            }

            // branch on the fractional variable: floor side first
            const double v = lp.x[frac];
            const int id = static_cast<int>(nodes_.size());
            nodes_.push_back(BnbNode{top.node, frac, true, std::floor(v), lp.objective});
            queue.push(QEntry{lp.objective, seq++, id});
            nodes_.push_back(BnbNode{top.node, frac, false, std::ceil(v), lp.objective});
            queue.push(QEntry{lp.objective, seq++, id + 1});
        }

        sol.node_count = solved;
        double open_bound = have_incumbent ? incumbent : -kInfinity;
        if (limit_hit) {
            // everything still queued caps what remains attainable
            if (!queue.empty()) open_bound = std::max(open_bound, queue.top().bound);
            sol.status = have_incumbent ? MilpStatus::LimitFeasible : MilpStatus::LimitUnknown;
            sol.best_bound = open_bound;
            if (have_incumbent) {
                sol.objective = incumbent;
                sol.x = std::move(incumbent_x);
            }
            return sol;
        }
        if (!have_incumbent) {
            sol.status = MilpStatus::Infeasible;
            return sol;
        }
        sol.status = MilpStatus::Optimal;
        sol.objective = incumbent;
        sol.best_bound = incumbent;
        sol.x = std::move(incumbent_x);
        return sol;
    }

private:
    const MilpProblem& prob_;
    MilpOptions opt_;
    LpProblem work_;
    std::vector<double> root_lower_, root_upper_;
    std::vector<BnbNode> nodes_;

    void apply_bounds(int node) {
        work_.lower = root_lower_;
        work_.upper = root_upper_;
        for (int id = node; id > 0; id = nodes_[id].parent) {
            const BnbNode& n = nodes_[id];
            if (n.is_upper)
                work_.upper[n.var] = std::min(work_.upper[n.var], n.bound_value);
            else
                work_.lower[n.var] = std::max(work_.lower[n.var], n.bound_value);
        }
    }

    /// Index of the integer variable farthest from integrality, smallest
    /// index on ties; -1 when everything is integral within tolerance.
    int most_fractional(const std::vector<double>& x) const {
        int best = -1;
        double best_score = -1.0;
        for (int j : prob_.integer_vars) {
            const double f = x[j] - std::round(x[j]);
            const double dist = std::abs(f);
            if (dist <= opt_.int_tol) continue;
            const double score = 0.5 - std::abs(dist - 0.5);  // peak at half-integral
            if (score > best_score + 1e-15) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    bool confirm(const std::vector<double>& x, double& objective,
                 std::vector<double>& xout) {
        for (int j : prob_.integer_vars) {
            const double v = std::round(x[j]);
            work_.lower[j] = v;
            work_.upper[j] = v;
        }
        const LpSolution lp = solve_lp(work_, opt_.lp);
        if (lp.status != LpStatus::Optimal) return false;
        objective = lp.objective;
        xout = lp.x;
        for (int j : prob_.integer_vars) xout[j] = std::round(xout[j]);
        return true;
    }
};

}  // namespace detail

inline MilpSolution solve_milp(const MilpProblem& problem, const MilpOptions& options = {}) {
    detail::BranchAndBound bb(problem, options);
    return bb.run();
}

}  // namespace mcsched
