#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcsched/errors.hpp"
#include "mcsched/formulations.hpp"
#include "mcsched/instance.hpp"
#include "mcsched/rounding.hpp"
#include "mcsched/verify.hpp"

namespace mcsched {

/// A scheme is a named end-to-end solving strategy for the sweep harness.
/// The first three run the constant-power formulations the headline curves
/// compare; the -milp and -heuristic variants add per-slot power control.
enum class Scheme { DmcOpt, DmcAll, UniAll, DmcOptMilp, DmcOptHeuristic };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::DmcOpt: return "dmc-opt";
        case Scheme::DmcAll: return "dmc-all";
        case Scheme::UniAll: return "uni-all";
        case Scheme::DmcOptMilp: return "dmc-opt-milp";
        case Scheme::DmcOptHeuristic: return "dmc-opt-heuristic";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "dmc-opt") return Scheme::DmcOpt;
    if (s == "dmc-all") return Scheme::DmcAll;
    if (s == "uni-all") return Scheme::UniAll;
    if (s == "dmc-opt-milp") return Scheme::DmcOptMilp;
    if (s == "dmc-opt-heuristic") return Scheme::DmcOptHeuristic;
    throw UnsupportedKindError("unknown scheme: " + s);
}

enum class RecordStatus { Optimal, Heuristic, Infeasible, LimitHit };

inline const char* to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::Optimal: return "optimal";
        case RecordStatus::Heuristic: return "heuristic";
        case RecordStatus::Infeasible: return "infeasible";
        case RecordStatus::LimitHit: return "limit-hit";
    }
    return "?";
}

inline RecordStatus parse_record_status(const std::string& s) {
    if (s == "optimal") return RecordStatus::Optimal;
    if (s == "heuristic") return RecordStatus::Heuristic;
    if (s == "infeasible") return RecordStatus::Infeasible;
    if (s == "limit-hit") return RecordStatus::LimitHit;
    throw UnsupportedKindError("unknown record status: " + s);
}

/// One solved (scheme, instance) cell of a sweep. Infeasible and unknown
/// outcomes carry throughput 0 and are flagged by status, never dropped.
struct ResultRecord {
    Scheme scheme = Scheme::DmcOpt;
    int N = 0;
    int D = 0;
    int T = 0;
    int B = 0;
    std::uint64_t seed = 0;
    double throughput = 0.0;
    RecordStatus status = RecordStatus::Infeasible;
    double seconds = 0.0;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// Sweep definition: source counts to scan, the shared topology/solver
/// parameters, and the trial plan. Defaults mirror the headline study:
/// groups of 2, 8 slots, full demand, constant power 90 mW, 30 trials.
struct ExperimentConfig {
    std::vector<int> sources{2, 4, 6, 8, 10};
    int group_size = 2;
    int T = 8;
    int demand = 8;
    std::vector<Scheme> schemes{Scheme::DmcOpt, Scheme::DmcAll, Scheme::UniAll};
    int trials = 30;
    std::uint64_t base_seed = 1;

    double path_loss_exponent = 3.0;
    double noise_power = 0.1;
    double distance_min = 0.05;
    double distance_max = 1.0;

    double beta = 10.0;
    double p_slot_max = 300.0;
    double p_slot_min = 3.0;
    double const_power = 90.0;
    std::optional<double> p_budget;  // unset: T * p_slot_max

    // Exact-MILP node cap so dense sweeps cannot hang; 0 disables. The cap
    // is a node count, not wall time, to keep reruns bit-reproducible.
    long milp_max_nodes = 250000;
    double milp_time_limit = 0.0;  // seconds; 0 disables; breaks reproducibility

    // Wall-time measurement is opt-in: published CSVs stay bit-identical
    // across reruns, which a varying seconds column would break.
    bool timing = false;

    void validate() const {
        if (sources.empty()) throw ConfigError("sweep needs at least one source count");
        for (int n : sources)
            if (n < 1) throw ConfigError("source counts must be >= 1");
        if (group_size < 1) throw ConfigError("group_size must be >= 1");
        if (schemes.empty()) throw ConfigError("scheme list must be non-empty");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (milp_max_nodes < 0) throw ConfigError("milp_max_nodes must be >= 0");
        if (milp_time_limit < 0.0) throw ConfigError("milp_time_limit must be >= 0");
        sched_params();  // surfaces bad solver parameters via SchedParams rules
    }

    SchedParams sched_params() const {
        SchedParams p;
        p.T = T;
        p.beta = beta;
        p.demand = demand;
        p.p_slot_max = p_slot_max;
        p.p_slot_min = p_slot_min;
        p.p_budget = p_budget;
        p.const_power = const_power;
        if (T < 1) throw ConfigError("slot count must be >= 1");
        if (demand < 1 || demand > T) throw ConfigError("demand must lie in [1, T]");
        if (!(p.p_slot_min > 0.0) || !(p.p_slot_min < p.p_slot_max))
            throw ConfigError("need 0 < p_slot_min < p_slot_max");
        if (!(p.const_power > 0.0) || p.const_power > p.p_slot_max)
            throw ConfigError("const_power must lie in (0, p_slot_max]");
        return p;
    }

    InstanceConfig instance_config(int n, std::uint64_t seed) const {
        InstanceConfig cfg;
        cfg.num_sources = n;
        cfg.group_size = group_size;
        cfg.path_loss_exponent = path_loss_exponent;
        cfg.noise_power = noise_power;
        cfg.distance_min = distance_min;
        cfg.distance_max = distance_max;
        cfg.seed = seed;
        return cfg;
    }
};

inline std::uint64_t splitmix64(std::uint64_t v) {
    v += 0x9E3779B97F4A7C15ull;
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
    v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
    return v ^ (v >> 31);
}

/// Instance seed for one sweep cell: the base seed XOR a mix of (N, trial).
/// Every scheme inside the cell shares the instance, so comparisons are
/// paired; distinct cells get statistically unrelated topologies.
inline std::uint64_t trial_seed(std::uint64_t base_seed, int n, int trial) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) |
        static_cast<std::uint32_t>(trial);
    return base_seed ^ splitmix64(key);
}

namespace detail {

inline FormulationKind formulation_for(Scheme s) {
    switch (s) {
        case Scheme::DmcOpt: return FormulationKind::DmcOptCp;
        case Scheme::DmcAll: return FormulationKind::McAllCp;
        case Scheme::UniAll: return FormulationKind::UniAll;
        case Scheme::DmcOptMilp: return FormulationKind::DmcOpt;
        case Scheme::DmcOptHeuristic:
            throw StateError("the heuristic scheme has no single formulation");
    }
    throw UnsupportedKindError("unhandled scheme");
}

/// Audits a schedule the harness is about to record. A failure here is not
/// an instance property; it means a builder or solver broke its contract.
inline double audited_throughput(const NetworkInstance& inst, const Schedule& sched,
                                 const SchedParams& params) {
    const VerificationReport report = verify_schedule(inst, sched, params);
    if (!report.all_ok())
        throw StateError("schedule failed verification; encoding or solver defect");
    return report.throughput;
}

}  // namespace detail

/// Solves one (scheme, instance) cell. Infeasibility and solver limits are
/// outcomes, recorded in the status; only contract violations throw.
inline ResultRecord run_single(Scheme scheme, const NetworkInstance& inst,
                               const ExperimentConfig& config, std::uint64_t seed) {
    ResultRecord rec;
    rec.scheme = scheme;
    rec.N = inst.num_sources;
    rec.D = config.group_size;
    rec.T = config.T;
    rec.B = config.demand;
    rec.seed = seed;

    const SchedParams params = config.sched_params();
    const auto start = std::chrono::steady_clock::now();
    try {
        if (scheme == Scheme::DmcOptHeuristic) {
            const Schedule sched = milp_relax_schedule(inst, params);
            rec.throughput = detail::audited_throughput(inst, sched, params);
            rec.status = RecordStatus::Heuristic;
        } else {
            auto [problem, vm] = build_formulation(detail::formulation_for(scheme), inst, params);
            MilpOptions opts;
            opts.max_nodes = config.milp_max_nodes;
            opts.time_limit_seconds = config.milp_time_limit;
            const MilpSolution sol = solve_milp(problem, opts);
            switch (sol.status) {
                case MilpStatus::Optimal: {
                    const Schedule sched = extract_schedule(vm, sol, params);
                    rec.throughput = detail::audited_throughput(inst, sched, params);
                    rec.status = RecordStatus::Optimal;
                    break;
                }
                case MilpStatus::LimitFeasible: {
                    const Schedule sched = extract_schedule(vm, sol, params);
                    rec.throughput = detail::audited_throughput(inst, sched, params);
                    rec.status = RecordStatus::LimitHit;
                    break;
                }
                case MilpStatus::LimitUnknown:
                    rec.status = RecordStatus::LimitHit;
                    break;
                case MilpStatus::Infeasible:
                    rec.status = RecordStatus::Infeasible;
                    break;
            }
        }
    } catch (const InfeasibleError&) {
        rec.status = RecordStatus::Infeasible;
    } catch (const RoundingFailureError&) {
        // the rounding pass exhausted its candidate ladder: this scheme
        // produced no schedule for the instance
        rec.status = RecordStatus::Infeasible;
    } catch (const SolverStallError&) {
        rec.status = RecordStatus::LimitHit;
    }
    if (config.timing) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        rec.seconds = dt.count();
    }
    return rec;
}

namespace detail {

/// Cross-scheme sanity on one shared instance: the opt formulation's
/// feasible set contains the all-or-nothing one, and the heuristic can
/// never beat the exact optimum it rounds.
inline void check_cell_invariants(const std::vector<ResultRecord>& cell) {
    const ResultRecord* opt = nullptr;
    const ResultRecord* all = nullptr;
    const ResultRecord* exact = nullptr;
    const ResultRecord* heur = nullptr;
    for (const ResultRecord& r : cell) {
        if (r.scheme == Scheme::DmcOpt) opt = &r;
        if (r.scheme == Scheme::DmcAll) all = &r;
        if (r.scheme == Scheme::DmcOptMilp) exact = &r;
        if (r.scheme == Scheme::DmcOptHeuristic) heur = &r;
    }
    if (opt && all) {
        if (opt->status == RecordStatus::Optimal && all->status == RecordStatus::Optimal &&
            opt->throughput + 1e-9 < all->throughput)
            throw StateError("containment violated: per-destination scheduling lost to "
                             "all-or-nothing on a shared instance");
        if (opt->status == RecordStatus::Infeasible && all->status == RecordStatus::Optimal)
            throw StateError("containment violated: all-or-nothing feasible but the "
                             "per-destination relaxation of it reported infeasible");
    }
    if (exact && heur && exact->status == RecordStatus::Optimal &&
        heur->status == RecordStatus::Heuristic &&
        heur->throughput > exact->throughput + 1e-9)
        throw StateError("heuristic exceeded the exact optimum on a shared instance");
}

}  // namespace detail

/// Runs the full sweep: every (N, trial) cell generates one instance shared
/// by all schemes. Per-record failures land in the record status; the sweep
/// itself only aborts on contract violations.
inline std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<ResultRecord> records;
    records.reserve(config.sources.size() * config.schemes.size() *
                    static_cast<std::size_t>(config.trials));
    for (int n : config.sources) {
        for (int trial = 0; trial < config.trials; ++trial) {
            const std::uint64_t seed = trial_seed(config.base_seed, n, trial);
            const NetworkInstance inst = generate_instance(config.instance_config(n, seed));
            std::vector<ResultRecord> cell;
            cell.reserve(config.schemes.size());
            for (Scheme scheme : config.schemes)
                cell.push_back(run_single(scheme, inst, config, seed));
            detail::check_cell_invariants(cell);
            records.insert(records.end(), cell.begin(), cell.end());
        }
    }
    return records;
}

}  // namespace mcsched
