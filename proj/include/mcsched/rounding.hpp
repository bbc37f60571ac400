#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcsched/bnb.hpp"
#include "mcsched/errors.hpp"
#include "mcsched/formulations.hpp"
#include "mcsched/lp.hpp"

namespace mcsched {

enum class RoundMode { Ceil, Floor };

inline std::string to_string(RoundMode m) { return m == RoundMode::Ceil ? "ceil" : "floor"; }

/// Working context of the iterative rounding pass: the relaxation solution
/// being rounded, the sources still free, and the entries committed so far.
/// Committed entries never change again.
struct RoundingState {
    NetworkInstance instance;
    SchedParams params;
    VarMap vm;
    std::set<int> remaining_sources;
    std::vector<double> c_values;  // per source, recomputed after every re-solve
    // -1 free, otherwise the committed 0/1 value; [t][i][j]
    std::vector<std::vector<std::vector<signed char>>> fixed_activations;
    std::vector<std::vector<double>> fixed_powers;  // [t][i], valid once i is committed
    LpSolution current_lp_solution;
};

/// One candidate commitment for a source: activate exactly these (slot, dest)
/// pairs, transmit with slot_power in the involved slots, stay silent in the
/// rest.
struct SourceFixing {
    int source = -1;
    int m = 0;
    std::vector<std::pair<int, int>> pairs;  // (slot, destination index)
    std::vector<double> slot_power;          // per slot, 0 when silent
};

/// One record per outer iteration of the rounding algorithm.
struct PassTrace {
    int source = -1;
    double c_value = 0.0;
    std::string mode;  // "ceil", "floor", or "floor-k" after k decrements
    int m = 0;
    int probes = 0;              // restricted LPs solved for this pass
    double lp_objective = 0.0;   // objective of the accepted restriction
};

inline std::string to_string(const PassTrace& p) {
    return "source=" + std::to_string(p.source) + " c=" + std::to_string(p.c_value) +
           " mode=" + p.mode + " m=" + std::to_string(p.m) +
           " probes=" + std::to_string(p.probes) + " lp=" + std::to_string(p.lp_objective);
}

/// Recomputes c_i, the summed link activation mass of each free source in the
/// current relaxation solution.
inline void recompute_c(RoundingState& st) {
    st.c_values.assign(st.instance.num_sources, 0.0);
    for (int i : st.remaining_sources) {
        double c = 0.0;
        for (int t = 0; t < st.params.T; ++t)
            for (std::size_t j = 0; j < st.instance.groups[i].size(); ++j)
                c += st.current_lp_solution.x[st.vm.link_var(t, i, static_cast<int>(j))];
        st.c_values[i] = c;
    }
}

/// The free source carrying the largest activation mass; ties go to the
/// smallest index.
inline int rank_sources(const RoundingState& st) {
    if (st.remaining_sources.empty()) throw StateError("no sources left to rank");
    int best = -1;
    for (int i : st.remaining_sources)  // set iterates in ascending order
        if (best < 0 || st.c_values[i] > st.c_values[best]) best = i;
    return best;
}

namespace detail {

// c_i values that are integral up to solver noise round exactly.
inline double snap_integral(double c) {
    return std::abs(c - std::round(c)) <= 1e-9 ? std::round(c) : c;
}

/// Top-m (slot, dest) pairs of source i by relaxation value, ties by smallest
/// (slot, dest); powers copied from the relaxation and clamped into the
/// transmitting window.
inline SourceFixing select_fixing(const RoundingState& st, int i, int m) {
    const int T = st.params.T;
    const int d = static_cast<int>(st.instance.groups[i].size());
    if (m < 0 || m > T * d)
        throw InputError("cannot fix " + std::to_string(m) + " pairs of source " +
                         std::to_string(i) + "; only " + std::to_string(T * d) + " exist");

    struct Cand {
        double value;
        int t, j;
    };
    std::vector<Cand> cands;
    cands.reserve(static_cast<std::size_t>(T) * d);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < d; ++j)
            cands.push_back({st.current_lp_solution.x[st.vm.link_var(t, i, j)], t, j});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.t != b.t) return a.t < b.t;
        return a.j < b.j;
    });

    SourceFixing fx;
    fx.source = i;
    fx.m = m;
    fx.slot_power.assign(T, 0.0);
    for (int k = 0; k < m; ++k) fx.pairs.emplace_back(cands[k].t, cands[k].j);
    std::sort(fx.pairs.begin(), fx.pairs.end());
    for (const auto& [t, j] : fx.pairs)
        fx.slot_power[t] = std::clamp(st.current_lp_solution.x[st.vm.power_var(t, i)],
                                      st.params.p_slot_min, st.params.p_slot_max);
    return fx;
}

}  // namespace detail

/// Rounds source i with m = ceil(c_i) or floor(c_i) per the mode.
inline SourceFixing round_source(const RoundingState& st, int i, RoundMode mode) {
    if (!st.remaining_sources.count(i))
        throw StateError("source " + std::to_string(i) + " is already committed");
    const double c = detail::snap_integral(st.c_values[i]);
    const int m = static_cast<int>(mode == RoundMode::Ceil ? std::ceil(c) : std::floor(c));
    return detail::select_fixing(st, i, m);
}

struct ProbeResult {
    bool feasible = false;
    LpSolution lp;  // the restricted relaxation's solution, when feasible
};

/// Solves the link-level relaxation with the committed entries substituted as
/// constants: every non-free activation entry pins its variable, and each
/// committed source additionally pins its transmit indicators and powers.
inline ProbeResult feasibility_probe(
    const NetworkInstance& inst, const SchedParams& params,
    const std::vector<std::vector<std::vector<signed char>>>& fixed_activations,
    const std::vector<std::vector<double>>& fixed_powers,
    const std::set<int>& remaining_sources) {
    auto [milp, vm] = build_dmc_opt(inst, params);
    LpProblem lp = relax(milp);

    for (int t = 0; t < params.T; ++t)
        for (int i = 0; i < inst.num_sources; ++i) {
            const bool committed = remaining_sources.count(i) == 0;
            bool transmitting = false;
            for (std::size_t j = 0; j < inst.groups[i].size(); ++j) {
                const signed char v = fixed_activations[t][i][j];
                if (v < 0) {
                    if (committed)
                        throw InputError("committed source " + std::to_string(i) +
                                         " has a free activation entry");
                    continue;
                }
                const int col = vm.link_var(t, i, static_cast<int>(j));
                lp.lower[col] = lp.upper[col] = v;
                transmitting = transmitting || v > 0;
            }
            if (committed) {
                const int zc = vm.indicator_var(t, i);
                lp.lower[zc] = lp.upper[zc] = transmitting ? 1.0 : 0.0;
                const int pc = vm.power_var(t, i);
                lp.lower[pc] = lp.upper[pc] = fixed_powers[t][i];
            }
        }

    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Optimal) return {true, sol};
    if (sol.status == LpStatus::Infeasible) return {false, {}};
    if (sol.status == LpStatus::IterLimit)
        throw SolverStallError("restricted relaxation hit its iteration limit");
    throw DomainError("restricted relaxation is unbounded");
}

/// Link-level scheduling by iterative LP rounding. Solves the relaxation,
/// then runs one pass per source: pick the free source with the largest
/// activation mass, commit its top-m pairs with m = ceil(c_i), fall back to
/// floor(c_i) and then to stepwise decrements down to the demand total when
/// the restricted relaxation is infeasible, and re-solve. The result is
/// integral and respects every model constraint; its throughput never exceeds
/// the exact optimum.
inline Schedule milp_relax_schedule(const NetworkInstance& inst, const SchedParams& params,
                                    std::vector<PassTrace>* trace = nullptr) {
    auto [milp, vm] = build_dmc_opt(inst, params);
    const LpSolution root = solve_lp(milp.lp);
    if (root.status == LpStatus::Infeasible)
        throw InfeasibleError("the relaxation admits no schedule");
    if (root.status == LpStatus::IterLimit)
        throw SolverStallError("root relaxation hit its iteration limit");
    if (root.status == LpStatus::Unbounded)
        throw DomainError("root relaxation is unbounded");

    const int n = inst.num_sources;
    const int T = params.T;
    RoundingState st;
    st.instance = inst;
    st.params = params;
    st.vm = vm;
    for (int i = 0; i < n; ++i) st.remaining_sources.insert(i);
    st.fixed_activations.assign(T, {});
    for (int t = 0; t < T; ++t) {
        st.fixed_activations[t].resize(n);
        for (int i = 0; i < n; ++i)
            st.fixed_activations[t][i].assign(inst.groups[i].size(), -1);
    }
    st.fixed_powers.assign(T, std::vector<double>(n, 0.0));
    st.current_lp_solution = root;
    if (trace) trace->clear();

    for (int pass = 0; pass < n; ++pass) {
        recompute_c(st);
        const int i = rank_sources(st);
        const double c = detail::snap_integral(st.c_values[i]);
        const int ceil_m = static_cast<int>(std::ceil(c));
        const int floor_m = static_cast<int>(std::floor(c));
        int demand_total = 0;
        for (std::size_t j = 0; j < inst.groups[i].size(); ++j)
            demand_total += params.demand_for(i, static_cast<int>(j));

        std::vector<int> candidates{ceil_m};
        for (int m = floor_m; m >= demand_total; --m)
            if (m != ceil_m) candidates.push_back(m);

        bool committed = false;
        int probes = 0;
        for (int m : candidates) {
            const SourceFixing fx = detail::select_fixing(st, i, m);
            auto trial_x = st.fixed_activations;
            auto trial_p = st.fixed_powers;
            for (int t = 0; t < T; ++t) {
                for (std::size_t j = 0; j < inst.groups[i].size(); ++j) trial_x[t][i][j] = 0;
                trial_p[t][i] = fx.slot_power[t];
            }
            for (const auto& [t, j] : fx.pairs) trial_x[t][i][j] = 1;
            std::set<int> trial_remaining = st.remaining_sources;
            trial_remaining.erase(i);

            const ProbeResult probe =
                feasibility_probe(inst, params, trial_x, trial_p, trial_remaining);
            ++probes;
            if (!probe.feasible) continue;

            st.fixed_activations = std::move(trial_x);
            st.fixed_powers = std::move(trial_p);
            st.remaining_sources = std::move(trial_remaining);
            st.current_lp_solution = probe.lp;
            if (trace) {
                PassTrace rec;
                rec.source = i;
                rec.c_value = st.c_values[i];
                rec.mode = m == ceil_m ? "ceil"
                         : m == floor_m ? "floor"
                                        : "floor-" + std::to_string(floor_m - m);
                rec.m = m;
                rec.probes = probes;
                rec.lp_objective = probe.lp.objective;
                trace->push_back(rec);
            }
            committed = true;
            break;
        }
        if (!committed)
            throw RoundingFailureError(
                i, "no rounding of source " + std::to_string(i) +
                       " yields a feasible restriction (tried m from " +
                       std::to_string(ceil_m) + " down to " + std::to_string(demand_total) + ")");
    }

    Schedule sched;
    sched.kind = FormulationKind::DmcOpt;
    sched.activations.assign(T, {});
    sched.powers = st.fixed_powers;
    for (int t = 0; t < T; ++t) {
        sched.activations[t].resize(n);
        for (int i = 0; i < n; ++i) {
            sched.activations[t][i].resize(inst.groups[i].size());
            for (std::size_t j = 0; j < inst.groups[i].size(); ++j)
                sched.activations[t][i][j] = static_cast<char>(st.fixed_activations[t][i][j]);
        }
    }
    return sched;
}

}  // namespace mcsched
