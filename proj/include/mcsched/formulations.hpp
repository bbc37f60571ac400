#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mcsched/bnb.hpp"
#include "mcsched/errors.hpp"
#include "mcsched/instance.hpp"
#include "mcsched/lp.hpp"

namespace mcsched {

enum class FormulationKind { McAll, DmcOpt, DmcOptCp, McAllCp, UniAll };

inline const char* to_string(FormulationKind k) {
    switch (k) {
        case FormulationKind::McAll: return "mc-all";
        case FormulationKind::DmcOpt: return "dmc-opt";
        case FormulationKind::DmcOptCp: return "dmc-opt-cp";
        case FormulationKind::McAllCp: return "mc-all-cp";
        case FormulationKind::UniAll: return "uni-all";
    }
    return "unknown";
}

inline FormulationKind parse_formulation_kind(const std::string& s) {
    if (s == "mc-all") return FormulationKind::McAll;
    if (s == "dmc-opt") return FormulationKind::DmcOpt;
    if (s == "dmc-opt-cp") return FormulationKind::DmcOptCp;
    if (s == "mc-all-cp") return FormulationKind::McAllCp;
    if (s == "uni-all") return FormulationKind::UniAll;
    throw UnsupportedKindError("unknown formulation kind: " + s);
}

/// Scheduling parameters shared by every formulation. Powers are in mW, the
/// SINR threshold is linear (not dB), and demands count slots per frame.
struct SchedParams {
    int T = 1;                          // slots per frame
    double beta = 10.0;                 // linear SINR threshold
    std::vector<std::vector<int>> B;    // per-link demand; empty = uniform
    int demand = 1;                     // uniform demand when B is empty
    double p_slot_max = 300.0;          // per-slot power ceiling
    double p_slot_min = 3.0;            // per-slot power floor while transmitting
    std::optional<double> p_budget;     // per-frame energy cap; default T * p_slot_max
    double const_power = 90.0;          // fixed level for the constant-power kinds
    std::optional<double> delta;        // big-M override; unset = derived from gains

    double budget() const { return p_budget ? *p_budget : T * p_slot_max; }

    int demand_for(int i, int j) const {
        if (B.empty()) return demand;
        return B[i][j];
    }

    /// Group-level demand: the tightest of the group's link demands.
    int group_demand(int i) const {
        if (B.empty()) return demand;
        int d = 1;
        for (int v : B[i]) d = std::max(d, v);
        return d;
    }

    void validate(const NetworkInstance& inst) const {
        if (T < 1) throw ConfigError("slot count must be >= 1, got " + std::to_string(T));
        if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
        if (!(p_slot_min > 0.0) || !(p_slot_min < p_slot_max))
            throw ConfigError("need 0 < p_slot_min < p_slot_max");
        if (!(budget() > 0.0)) throw ConfigError("power budget must be > 0");
        if (!(const_power > 0.0) || const_power > p_slot_max)
            throw ConfigError("const_power must lie in (0, p_slot_max]");
        if (delta && !(*delta > 0.0)) throw ConfigError("delta override must be > 0");
        if (B.empty()) {
            if (demand < 1 || demand > T)
                throw ConfigError("demand must lie in [1, T], got " + std::to_string(demand));
        } else {
            if (static_cast<int>(B.size()) != inst.num_sources)
                throw ConfigError("demand matrix must have one row per source");
            for (int i = 0; i < inst.num_sources; ++i) {
                if (static_cast<int>(B[i].size()) != inst.group_size(i))
                    throw ConfigError("demand row " + std::to_string(i) +
                                      " must cover the group");
                for (int v : B[i])
                    if (v < 1 || v > T)
                        throw ConfigError("demands must lie in [1, T]");
            }
        }
    }
};

enum class VarKind { GroupActivation, LinkActivation, Power, Indicator };

struct VarEntry {
    VarKind kind;
    int t;
    int i;
    int j;  // destination index within the group; -1 for non-link kinds
};

/// Column layout of a built problem: which semantic variable each column
/// holds, with lookups in both directions. Layouts are fixed per kind so
/// solves and decodes stay reproducible.
struct VarMap {
    FormulationKind kind = FormulationKind::McAll;
    int num_sources = 0;
    int T = 0;
    std::vector<int> group_sizes;
    std::vector<VarEntry> entries;  // one per column

    int total() const { return static_cast<int>(entries.size()); }

    bool has_links() const { return kind != FormulationKind::McAll && kind != FormulationKind::McAllCp; }
    bool has_group_vars() const { return !has_links(); }
    bool has_powers() const {
        return kind == FormulationKind::McAll || kind == FormulationKind::DmcOpt;
    }
    bool has_indicators() const {
        return kind == FormulationKind::DmcOpt || kind == FormulationKind::DmcOptCp ||
               kind == FormulationKind::UniAll;
    }

    int group_var(int t, int i) const {
        require(has_group_vars(), "no group activation variables in this formulation");
        check(t, i);
        return t * num_sources + i;
    }

    int link_var(int t, int i, int j) const {
        require(has_links(), "no link activation variables in this formulation");
        check(t, i);
        if (j < 0 || j >= group_sizes[i]) throw LookupError("destination index out of range");
        return t * links_per_slot_ + link_base_[i] + j;
    }

    int indicator_var(int t, int i) const {
        require(has_indicators(), "no transmitter indicators in this formulation");
        check(t, i);
        return T * links_per_slot_ + t * num_sources + i;
    }

    int power_var(int t, int i) const {
        require(has_powers(), "no power variables in this formulation");
        check(t, i);
        if (kind == FormulationKind::McAll) return T * num_sources + t * num_sources + i;
        return T * links_per_slot_ + T * num_sources + t * num_sources + i;
    }

    void finalize() {
        link_base_.assign(group_sizes.size(), 0);
        links_per_slot_ = 0;
        for (std::size_t i = 0; i < group_sizes.size(); ++i) {
            link_base_[i] = links_per_slot_;
            links_per_slot_ += group_sizes[i];
        }
    }

private:
    std::vector<int> link_base_;
    int links_per_slot_ = 0;

    static void require(bool ok, const char* msg) {
        if (!ok) throw LookupError(msg);
    }
    void check(int t, int i) const {
        if (t < 0 || t >= T) throw LookupError("slot index out of range");
        if (i < 0 || i >= num_sources) throw LookupError("source index out of range");
    }
};

/// One frame's worth of decisions: which links fire in which slot and at
/// what transmit power.
struct Schedule {
    FormulationKind kind = FormulationKind::McAll;
    // activations[t][i][j]: link from source i to its j-th destination in slot t
    std::vector<std::vector<std::vector<char>>> activations;
    // powers[t][i]: transmit power of source i in slot t, mW
    std::vector<std::vector<double>> powers;

    int num_slots() const { return static_cast<int>(activations.size()); }
    int num_sources() const {
        return activations.empty() ? 0 : static_cast<int>(activations[0].size());
    }
};

/// Linearization constant for the activation big-M rows: strictly dominates
/// beta times any achievable interference-plus-noise level, plus the largest
/// single received-signal term, so a disabled row can never bind.
inline double big_m(const NetworkInstance& inst, const SchedParams& params) {
    if (params.delta) return *params.delta;
    const int m = inst.num_destinations();
    double sum_max = 0.0;  // sum over sources of their strongest outgoing gain
    double gain_max = 0.0;
    for (int k = 0; k < inst.num_sources; ++k) {
        double g = 0.0;
        for (int j = 0; j < m; ++j) g = std::max(g, inst.gain(k, j));
        sum_max += params.p_slot_max * g;
        gain_max = std::max(gain_max, g);
    }
    return params.beta * (inst.noise_power + sum_max) + params.p_slot_max * gain_max;
}

namespace detail {

struct BuildContext {
    const NetworkInstance& inst;
    const SchedParams& params;
    double delta;
    std::vector<std::vector<double>> gains;  // [source][global destination]

    BuildContext(const NetworkInstance& instance, const SchedParams& p)
        : inst(instance), params(p) {
        instance.validate();
        p.validate(instance);
        delta = big_m(instance, p);
        const int m = instance.num_destinations();
        gains.assign(instance.num_sources, std::vector<double>(m, 0.0));
        for (int k = 0; k < instance.num_sources; ++k)
            for (int j = 0; j < m; ++j) gains[k][j] = instance.gain(k, j);
    }
};

inline std::string tag(const char* stem, int t, int i) {
    return std::string(stem) + "_t" + std::to_string(t) + "_s" + std::to_string(i);
}
inline std::string tag(const char* stem, int t, int i, int j) {
    return tag(stem, t, i) + "_d" + std::to_string(j);
}

inline VarMap map_skeleton(FormulationKind kind, const NetworkInstance& inst, int T) {
    VarMap vm;
    vm.kind = kind;
    vm.num_sources = inst.num_sources;
    vm.T = T;
    vm.group_sizes.resize(inst.num_sources);
    for (int i = 0; i < inst.num_sources; ++i) vm.group_sizes[i] = inst.group_size(i);
    vm.finalize();
    return vm;
}

}  // namespace detail

/// Joint power-and-activation program over whole multicast groups: a source
/// either reaches its entire group in a slot or stays silent. Objective
/// counts destination receptions per slot.
///
/// Column order: x[t][i] over slots then sources, followed by P[t][i] in the
/// same order. Row order: activation (SINR) rows over (t, i, j), demand per
/// source, energy budget per source, power-activation links per (t, i).
inline std::pair<MilpProblem, VarMap> build_mc_all(const NetworkInstance& inst,
                                                   const SchedParams& params) {
    detail::BuildContext ctx(inst, params);
    const int N = inst.num_sources;
    const int T = params.T;
    VarMap vm = detail::map_skeleton(FormulationKind::McAll, inst, T);

    MilpProblem mp;
    LpProblem& lp = mp.lp;
    lp.name = "mc-all";
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            const int col = lp.add_var(0.0, 1.0, inst.group_size(i) / double(T),
                                       detail::tag("x", t, i));
            mp.integer_vars.push_back(col);
            vm.entries.push_back(VarEntry{VarKind::GroupActivation, t, i, -1});
        }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            lp.add_var(0.0, params.p_slot_max, 0.0, detail::tag("P", t, i));
            vm.entries.push_back(VarEntry{VarKind::Power, t, i, -1});
        }

    // activation rows: receiving j from i needs the power advantage once
    // x[t][i] is on; delta blanks the row otherwise
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < inst.group_size(i); ++j) {
                const int dest = inst.groups[i][j];
                std::vector<std::pair<int, double>> terms;
                terms.emplace_back(vm.power_var(t, i), ctx.gains[i][dest]);
                for (int k = 0; k < N; ++k) {
                    if (k == i) continue;
                    terms.emplace_back(vm.power_var(t, k), -params.beta * ctx.gains[k][dest]);
                }
                terms.emplace_back(vm.group_var(t, i), -ctx.delta);
                lp.add_row(std::move(terms), Relation::GreaterEq,
                           params.beta * inst.noise_power - ctx.delta,
                           detail::tag("sinr", t, i, j));
            }
    for (int i = 0; i < N; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int t = 0; t < T; ++t) terms.emplace_back(vm.group_var(t, i), 1.0);
        lp.add_row(std::move(terms), Relation::GreaterEq, params.group_demand(i),
                   "demand_s" + std::to_string(i));
    }
    for (int i = 0; i < N; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int t = 0; t < T; ++t) terms.emplace_back(vm.power_var(t, i), 1.0);
        lp.add_row(std::move(terms), Relation::LessEq, params.budget(),
                   "budget_s" + std::to_string(i));
    }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i)
            lp.add_row({{vm.power_var(t, i), 1.0}, {vm.group_var(t, i), -params.p_slot_max}},
                       Relation::LessEq, 0.0, detail::tag("pmax", t, i));
    return {std::move(mp), std::move(vm)};
}

/// Joint power-and-activation program over individual links: a source may
/// serve any subset of its group per slot. Transmitter indicators z tie the
/// power window to actual transmission.
///
/// Column order: x[t][i][j], then z[t][i], then P[t][i]. Row order: SINR
/// rows over (t, i, j), per-slot group caps, per-link demands, budgets,
/// x-to-z links, power windows per (t, i).
inline std::pair<MilpProblem, VarMap> build_dmc_opt(const NetworkInstance& inst,
                                                    const SchedParams& params) {
    detail::BuildContext ctx(inst, params);
    const int N = inst.num_sources;
    const int T = params.T;
    VarMap vm = detail::map_skeleton(FormulationKind::DmcOpt, inst, T);

    MilpProblem mp;
    LpProblem& lp = mp.lp;
    lp.name = "dmc-opt";
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < inst.group_size(i); ++j) {
                const int col = lp.add_var(0.0, 1.0, 1.0 / double(T), detail::tag("x", t, i, j));
                mp.integer_vars.push_back(col);
                vm.entries.push_back(VarEntry{VarKind::LinkActivation, t, i, j});
            }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            const int col = lp.add_var(0.0, 1.0, 0.0, detail::tag("z", t, i));
            mp.integer_vars.push_back(col);
            vm.entries.push_back(VarEntry{VarKind::Indicator, t, i, -1});
        }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            lp.add_var(0.0, params.p_slot_max, 0.0, detail::tag("P", t, i));
            vm.entries.push_back(VarEntry{VarKind::Power, t, i, -1});
        }

    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < inst.group_size(i); ++j) {
                const int dest = inst.groups[i][j];
                std::vector<std::pair<int, double>> terms;
                terms.emplace_back(vm.power_var(t, i), ctx.gains[i][dest]);
                for (int k = 0; k < N; ++k) {
                    if (k == i) continue;
                    terms.emplace_back(vm.power_var(t, k), -params.beta * ctx.gains[k][dest]);
                }
                terms.emplace_back(vm.link_var(t, i, j), -ctx.delta);
                lp.add_row(std::move(terms), Relation::GreaterEq,
                           params.beta * inst.noise_power - ctx.delta,
                           detail::tag("sinr", t, i, j));
            }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 0; j < inst.group_size(i); ++j)
                terms.emplace_back(vm.link_var(t, i, j), 1.0);
            lp.add_row(std::move(terms), Relation::LessEq, inst.group_size(i),
                       detail::tag("cap", t, i));
        }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < inst.group_size(i); ++j) {
            std::vector<std::pair<int, double>> terms;
            for (int t = 0; t < T; ++t) terms.emplace_back(vm.link_var(t, i, j), 1.0);
            lp.add_row(std::move(terms), Relation::GreaterEq, params.demand_for(i, j),
                       "demand_s" + std::to_string(i) + "_d" + std::to_string(j));
        }
    for (int i = 0; i < N; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int t = 0; t < T; ++t) terms.emplace_back(vm.power_var(t, i), 1.0);
        lp.add_row(std::move(terms), Relation::LessEq, params.budget(),
                   "budget_s" + std::to_string(i));
    }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < inst.group_size(i); ++j)
                lp.add_row({{vm.link_var(t, i, j), 1.0}, {vm.indicator_var(t, i), -1.0}},
                           Relation::LessEq, 0.0, detail::tag("link", t, i, j));
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            lp.add_row({{vm.power_var(t, i), 1.0},
                        {vm.indicator_var(t, i), -params.p_slot_max}},
                       Relation::LessEq, 0.0, detail::tag("pmax", t, i));
            lp.add_row({{vm.power_var(t, i), 1.0},
                        {vm.indicator_var(t, i), -params.p_slot_min}},
                       Relation::GreaterEq, 0.0, detail::tag("pmin", t, i));
        }
    return {std::move(mp), std::move(vm)};
}

namespace detail {

/// Shared body of the constant-power kinds. Interference is switched by the
/// transmitter column (z, or the group activation itself), and the received
/// signal is a constant folded into the right-hand side.
inline void add_cp_sinr_rows(LpProblem& lp, const BuildContext& ctx, const VarMap& vm,
                             bool group_kind) {
    const NetworkInstance& inst = ctx.inst;
    const SchedParams& params = ctx.params;
    const double P = params.const_power;
    for (int t = 0; t < vm.T; ++t)
        for (int i = 0; i < inst.num_sources; ++i)
            for (int j = 0; j < inst.group_size(i); ++j) {
                const int dest = inst.groups[i][j];
                std::vector<std::pair<int, double>> terms;
                const int xcol = group_kind ? vm.group_var(t, i) : vm.link_var(t, i, j);
                terms.emplace_back(xcol, -ctx.delta);
                for (int k = 0; k < inst.num_sources; ++k) {
                    if (k == i) continue;
                    const int zcol = group_kind ? vm.group_var(t, k) : vm.indicator_var(t, k);
                    terms.emplace_back(zcol, -params.beta * P * ctx.gains[k][dest]);
                }
                lp.add_row(std::move(terms), Relation::GreaterEq,
                           params.beta * inst.noise_power - P * ctx.gains[i][dest] - ctx.delta,
                           detail::tag("sinr", t, i, j));
            }
}

}  // namespace detail

/// Constant-power variant over links: transmit power is pinned to
/// const_power, leaving a pure activation program.
///
/// Column order: x[t][i][j] then z[t][i]. Row order: SINR rows over
/// (t, i, j), per-slot group caps, per-link demands, x-to-z links.
inline std::pair<MilpProblem, VarMap> build_dmc_opt_cp(const NetworkInstance& inst,
                                                       const SchedParams& params) {
    detail::BuildContext ctx(inst, params);
    const int N = inst.num_sources;
    const int T = params.T;
    VarMap vm = detail::map_skeleton(FormulationKind::DmcOptCp, inst, T);

    MilpProblem mp;
    LpProblem& lp = mp.lp;
    lp.name = "dmc-opt-cp";
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < inst.group_size(i); ++j) {
                const int col = lp.add_var(0.0, 1.0, 1.0 / double(T), detail::tag("x", t, i, j));
                mp.integer_vars.push_back(col);
                vm.entries.push_back(VarEntry{VarKind::LinkActivation, t, i, j});
            }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            const int col = lp.add_var(0.0, 1.0, 0.0, detail::tag("z", t, i));
            mp.integer_vars.push_back(col);
            vm.entries.push_back(VarEntry{VarKind::Indicator, t, i, -1});
        }

    detail::add_cp_sinr_rows(lp, ctx, vm, /*group_kind=*/false);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 0; j < inst.group_size(i); ++j)
                terms.emplace_back(vm.link_var(t, i, j), 1.0);
            lp.add_row(std::move(terms), Relation::LessEq, inst.group_size(i),
                       detail::tag("cap", t, i));
        }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < inst.group_size(i); ++j) {
            std::vector<std::pair<int, double>> terms;
            for (int t = 0; t < T; ++t) terms.emplace_back(vm.link_var(t, i, j), 1.0);
            lp.add_row(std::move(terms), Relation::GreaterEq, params.demand_for(i, j),
                       "demand_s" + std::to_string(i) + "_d" + std::to_string(j));
        }
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < inst.group_size(i); ++j)
                lp.add_row({{vm.link_var(t, i, j), 1.0}, {vm.indicator_var(t, i), -1.0}},
                           Relation::LessEq, 0.0, detail::tag("link", t, i, j));
    return {std::move(mp), std::move(vm)};
}

/// Constant-power variant over whole groups: the baseline where a multicast
/// group is one schedulable entity.
///
/// Column order: x[t][i]. Row order: SINR rows over (t, i, j), demand per
/// source.
inline std::pair<MilpProblem, VarMap> build_mc_all_cp(const NetworkInstance& inst,
                                                      const SchedParams& params) {
    detail::BuildContext ctx(inst, params);
    const int N = inst.num_sources;
    const int T = params.T;
    VarMap vm = detail::map_skeleton(FormulationKind::McAllCp, inst, T);

    MilpProblem mp;
    LpProblem& lp = mp.lp;
    lp.name = "mc-all-cp";
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < N; ++i) {
            const int col = lp.add_var(0.0, 1.0, inst.group_size(i) / double(T),
                                       detail::tag("x", t, i));
            mp.integer_vars.push_back(col);
            vm.entries.push_back(VarEntry{VarKind::GroupActivation, t, i, -1});
        }

    detail::add_cp_sinr_rows(lp, ctx, vm, /*group_kind=*/true);
    for (int i = 0; i < N; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int t = 0; t < T; ++t) terms.emplace_back(vm.group_var(t, i), 1.0);
        lp.add_row(std::move(terms), Relation::GreaterEq, params.group_demand(i),
                   "demand_s" + std::to_string(i));
    }
    return {std::move(mp), std::move(vm)};
}

/// Unicast serialization: the link program at constant power, but a source
/// may serve at most one destination per slot.
///
/// Column and row order follow the link variant, with the per-slot
/// single-destination rows appended last.
inline std::pair<MilpProblem, VarMap> build_uni_all(const NetworkInstance& inst,
                                                    const SchedParams& params) {
    auto [mp, vm] = build_dmc_opt_cp(inst, params);
    mp.lp.name = "uni-all";
    vm.kind = FormulationKind::UniAll;
    for (int t = 0; t < params.T; ++t)
        for (int i = 0; i < inst.num_sources; ++i) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 0; j < inst.group_size(i); ++j)
                terms.emplace_back(vm.link_var(t, i, j), 1.0);
            mp.lp.add_row(std::move(terms), Relation::LessEq, 1.0, detail::tag("uni", t, i));
        }
    return {std::move(mp), std::move(vm)};
}

inline std::pair<MilpProblem, VarMap> build_formulation(FormulationKind kind,
                                                        const NetworkInstance& inst,
                                                        const SchedParams& params) {
    switch (kind) {
        case FormulationKind::McAll: return build_mc_all(inst, params);
        case FormulationKind::DmcOpt: return build_dmc_opt(inst, params);
        case FormulationKind::DmcOptCp: return build_dmc_opt_cp(inst, params);
        case FormulationKind::McAllCp: return build_mc_all_cp(inst, params);
        case FormulationKind::UniAll: return build_uni_all(inst, params);
    }
    throw UnsupportedKindError("unhandled formulation kind");
}

/// Decodes a primal point into a Schedule. Binary columns must sit within
/// tol of 0 or 1. Group activations broadcast to every link of the group;
/// powers are zeroed whenever the transmitter is off, and constant-power
/// kinds emit const_power on active transmitters.
inline Schedule extract_schedule(const VarMap& vm, const std::vector<double>& x,
                                 const SchedParams& params, double tol = 1e-6) {
    if (static_cast<int>(x.size()) != vm.total())
        throw InputError("primal vector length does not match the variable map");
    auto as_bit = [tol](double v, const std::string& what) -> bool {
        const double r = std::round(v);
        if (std::abs(v - r) > tol || (r != 0.0 && r != 1.0))
            throw DecodeError(what + " is not binary: " + std::to_string(v));
        return r == 1.0;
    };

    Schedule sched;
    sched.kind = vm.kind;
    sched.activations.assign(vm.T, {});
    sched.powers.assign(vm.T, std::vector<double>(vm.num_sources, 0.0));
    for (int t = 0; t < vm.T; ++t) {
        sched.activations[t].resize(vm.num_sources);
        for (int i = 0; i < vm.num_sources; ++i)
            sched.activations[t][i].assign(vm.group_sizes[i], 0);
    }

    for (int t = 0; t < vm.T; ++t) {
        for (int i = 0; i < vm.num_sources; ++i) {
            bool transmitting = false;
            if (vm.has_group_vars()) {
                const bool on = as_bit(x[vm.group_var(t, i)], detail::tag("x", t, i));
                transmitting = on;
                for (int j = 0; j < vm.group_sizes[i]; ++j)
                    sched.activations[t][i][j] = on ? 1 : 0;
            } else {
                for (int j = 0; j < vm.group_sizes[i]; ++j)
                    sched.activations[t][i][j] =
                        as_bit(x[vm.link_var(t, i, j)], detail::tag("x", t, i, j)) ? 1 : 0;
                transmitting = as_bit(x[vm.indicator_var(t, i)], detail::tag("z", t, i));
            }
            if (!transmitting) continue;  // power stays zero
            if (vm.has_powers()) {
                const double p = x[vm.power_var(t, i)];
                sched.powers[t][i] = std::clamp(p, 0.0, params.p_slot_max);
            } else {
                sched.powers[t][i] = params.const_power;
            }
        }
    }
    return sched;
}

inline Schedule extract_schedule(const VarMap& vm, const MilpSolution& sol,
                                 const SchedParams& params, double tol = 1e-6) {
    if (sol.status != MilpStatus::Optimal && sol.status != MilpStatus::LimitFeasible)
        throw StateError("cannot decode a schedule without a feasible solution");
    return extract_schedule(vm, sol.x, params, tol);
}

inline Schedule extract_schedule(const VarMap& vm, const LpSolution& sol,
                                 const SchedParams& params, double tol = 1e-6) {
    if (sol.status != LpStatus::Optimal)
        throw StateError("cannot decode a schedule from a non-optimal relaxation");
    return extract_schedule(vm, sol.x, params, tol);
}

}  // namespace mcsched
