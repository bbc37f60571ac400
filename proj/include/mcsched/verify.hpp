#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mcsched/errors.hpp"
#include "mcsched/formulations.hpp"
#include "mcsched/instance.hpp"

namespace mcsched {

/// Relative tolerance for the physical checks, matching the LP feasibility
/// tolerance so the auditor never rejects a point the solver accepts.
inline constexpr double kVerifyTol = 1e-7;

/// Outcome of auditing a schedule directly against the physical model,
/// bypassing the big-M encoding entirely.
struct VerificationReport {
    bool sinr_ok = true;
    // min over active links of sinr - beta; +infinity when nothing is active
    double worst_sinr_margin = std::numeric_limits<double>::infinity();
    std::vector<char> budget_ok;               // per source
    std::vector<std::vector<char>> demand_ok;  // per link, indexed like groups
    bool power_bounds_ok = true;
    double throughput = 0.0;  // destination-receptions per slot

    bool all_ok() const {
        if (!sinr_ok || !power_bounds_ok) return false;
        for (char b : budget_ok)
            if (!b) return false;
        for (const auto& row : demand_ok)
            for (char b : row)
                if (!b) return false;
        return true;
    }
};

/// Destination-receptions per slot: the count of active link entries divided
/// by the number of slots.
inline double throughput(const Schedule& sched) {
    if (sched.activations.empty()) return 0.0;
    long count = 0;
    for (const auto& slot : sched.activations)
        for (const auto& links : slot)
            for (char bit : links) count += bit != 0;
    return static_cast<double>(count) / static_cast<double>(sched.activations.size());
}

/// Checks a schedule against the physical model: SINR ratio on every active
/// link, per-source power budgets, per-link demands, and per-slot power
/// bounds (with the rule that a source active in no link of a slot must be
/// silent there). The report is a pure function of the inputs; parameters are
/// taken as given, so vacuous demands (B = 0) are auditable even though the
/// problem builders reject them.
inline VerificationReport verify_schedule(const NetworkInstance& inst, const Schedule& sched,
                                          const SchedParams& params) {
    const int n = inst.num_sources;
    const int T = params.T;
    if (sched.num_slots() != T)
        throw InputError("schedule has " + std::to_string(sched.num_slots()) +
                         " slots but parameters say " + std::to_string(T));
    if (static_cast<int>(sched.powers.size()) != T)
        throw InputError("schedule power tensor must have one row per slot");
    for (int t = 0; t < T; ++t) {
        if (static_cast<int>(sched.activations[t].size()) != n ||
            static_cast<int>(sched.powers[t].size()) != n)
            throw InputError("slot " + std::to_string(t) +
                             " is not shaped for " + std::to_string(n) + " sources");
        for (int i = 0; i < n; ++i)
            if (sched.activations[t][i].size() != inst.groups[i].size())
                throw InputError("slot " + std::to_string(t) + ", source " + std::to_string(i) +
                                 ": activation row does not match the group size");
        for (double p : sched.powers[t])
            if (p < 0.0) throw DomainError("transmit power must be non-negative");
    }

    VerificationReport rep;

    for (int t = 0; t < T; ++t) {
        const std::span<const double> pw(sched.powers[t]);
        for (int i = 0; i < n; ++i)
            for (std::size_t j = 0; j < inst.groups[i].size(); ++j) {
                if (!sched.activations[t][i][j]) continue;
                const double margin = sinr(inst, pw, i, inst.groups[i][j]) - params.beta;
                rep.worst_sinr_margin = std::min(rep.worst_sinr_margin, margin);
            }
    }
    rep.sinr_ok = rep.worst_sinr_margin >= -kVerifyTol * std::max(1.0, params.beta);

    const double budget = params.budget();
    rep.budget_ok.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        double spent = 0.0;
        for (int t = 0; t < T; ++t) spent += sched.powers[t][i];
        if (spent - budget > kVerifyTol * std::max(1.0, budget)) rep.budget_ok[i] = 0;
    }

    rep.demand_ok.resize(n);
    for (int i = 0; i < n; ++i) {
        rep.demand_ok[i].resize(inst.groups[i].size(), 1);
        for (std::size_t j = 0; j < inst.groups[i].size(); ++j) {
            int active = 0;
            for (int t = 0; t < T; ++t) active += sched.activations[t][i][j] != 0;
            if (active < params.demand_for(i, static_cast<int>(j))) rep.demand_ok[i][j] = 0;
        }
    }

    const double power_tol = kVerifyTol * std::max(1.0, params.p_slot_max);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) {
            const double p = sched.powers[t][i];
            if (p - params.p_slot_max > power_tol) rep.power_bounds_ok = false;
            bool transmitting = false;
            for (char bit : sched.activations[t][i]) transmitting = transmitting || bit != 0;
            if (!transmitting && p > power_tol) rep.power_bounds_ok = false;
        }

    rep.throughput = throughput(sched);
    return rep;
}

/// Exact optimum by exhaustive enumeration. `feasible` is false when no
/// assignment passes every check; the schedule is then empty.
struct BruteForceResult {
    bool feasible = false;
    double throughput = 0.0;
    Schedule schedule;
};

/// Enumerates every 0/1 activation assignment of a constant-power kind,
/// filters through verify_schedule, and returns the maximum throughput with
/// the lexicographically smallest optimal witness (bit order matching the
/// formulation's activation-variable order: slot-major, then source, then
/// destination). Transmit powers are derived: const_power when a source has
/// an active link in the slot, zero otherwise.
inline BruteForceResult brute_force_opt(const NetworkInstance& inst, const SchedParams& params,
                                        FormulationKind kind) {
    params.validate(inst);
    const bool group_level = kind == FormulationKind::McAllCp;
    if (kind != FormulationKind::McAllCp && kind != FormulationKind::DmcOptCp &&
        kind != FormulationKind::UniAll)
        throw UnsupportedKindError("enumeration over continuous powers is undefined; "
                                   "brute force handles the constant-power kinds only");

    const int n = inst.num_sources;
    const int T = params.T;
    int links = 0;
    for (const auto& g : inst.groups) links += static_cast<int>(g.size());
    const int nbits = T * (group_level ? n : links);
    if (nbits > 20)
        throw SizeError("enumeration needs " + std::to_string(nbits) +
                        " binaries, above the cap of 20");

    Schedule sched;
    sched.kind = kind;
    sched.activations.assign(T, {});
    sched.powers.assign(T, std::vector<double>(n, 0.0));
    for (int t = 0; t < T; ++t) {
        sched.activations[t].resize(n);
        for (int i = 0; i < n; ++i) sched.activations[t][i].assign(inst.groups[i].size(), 0);
    }

    BruteForceResult best;
    const std::uint32_t total = std::uint32_t{1} << nbits;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        int bit = nbits;  // consumed most-significant first: ascending masks
                          // enumerate activation strings in lexicographic order
        bool structure_ok = true;
        for (int t = 0; t < T && structure_ok; ++t)
            for (int i = 0; i < n && structure_ok; ++i) {
                int active = 0;
                for (std::size_t j = 0; j < inst.groups[i].size(); ++j) {
                    char on;
                    if (group_level) {
                        if (j == 0) --bit;
                        on = static_cast<char>((mask >> bit) & 1u);
                    } else {
                        --bit;
                        on = static_cast<char>((mask >> bit) & 1u);
                    }
                    sched.activations[t][i][j] = on;
                    active += on;
                }
                if (kind == FormulationKind::UniAll && active > 1) structure_ok = false;
                sched.powers[t][i] = active > 0 ? params.const_power : 0.0;
            }
        if (!structure_ok) continue;

        const VerificationReport rep = verify_schedule(inst, sched, params);
        if (!rep.all_ok()) continue;
        if (!best.feasible || rep.throughput > best.throughput) {
            best.feasible = true;
            best.throughput = rep.throughput;
            best.schedule = sched;
        }
    }
    return best;
}

}  // namespace mcsched
