// Command-line front end: generate instances, solve or round a single
// instance, audit schedules, and run the full throughput sweep.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcsched/experiment.hpp"
#include "mcsched/io.hpp"
#include "mcsched/rounding.hpp"
#include "mcsched/verify.hpp"

namespace {

using namespace mcsched;

// Exit codes: 0 ok, 1 usage, 2 bad input/config, 3 no feasible schedule,
// 4 solver limit without an answer, 5 internal contract violation.
constexpr int kExitUsage = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitLimit = 4;
constexpr int kExitInternal = 5;

struct SolveFlags {
    int slots = 1;
    int demand = 1;
    double beta = 10.0;
    double p_max = 300.0;
    double p_min = 3.0;
    double const_power = 90.0;
    double budget = 0.0;  // 0: default T * p_max
    long max_nodes = 0;
    double time_limit = 0.0;

    SchedParams params() const {
        SchedParams p;
        p.T = slots;
        p.demand = demand;
        p.beta = beta;
        p.p_slot_max = p_max;
        p.p_slot_min = p_min;
        p.const_power = const_power;
        if (budget > 0.0) p.p_budget = budget;
        return p;
    }
};

void add_solve_flags(CLI::App& cmd, SolveFlags& f) {
    cmd.add_option("--slots", f.slots, "slots per frame")->capture_default_str();
    cmd.add_option("--demand", f.demand, "per-link slot demand")->capture_default_str();
    cmd.add_option("--beta", f.beta, "linear SINR threshold")->capture_default_str();
    cmd.add_option("--pmax", f.p_max, "per-slot power ceiling, mW")->capture_default_str();
    cmd.add_option("--pmin", f.p_min, "per-slot power floor while transmitting, mW")
        ->capture_default_str();
    cmd.add_option("--const-power", f.const_power,
                   "fixed level for the constant-power schemes, mW")
        ->capture_default_str();
    cmd.add_option("--budget", f.budget, "per-frame energy cap, mW (0: slots*pmax)")
        ->capture_default_str();
    cmd.add_option("--max-nodes", f.max_nodes, "exact-solver node cap (0: unlimited)")
        ->capture_default_str();
    cmd.add_option("--time-limit", f.time_limit, "exact-solver seconds cap (0: unlimited)")
        ->capture_default_str();
}

int cmd_gen(const InstanceConfig& cfg, const std::string& out) {
    const NetworkInstance inst = generate_instance(cfg);
    save_instance(inst, out);
    std::printf("wrote %s: %d sources, %d destinations each, seed %llu\n", out.c_str(),
                cfg.num_sources, cfg.group_size,
                static_cast<unsigned long long>(cfg.seed));
    return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& scheme_name,
              const SolveFlags& flags, const std::string& out) {
    const NetworkInstance inst = load_instance(instance_path);
    const SchedParams params = flags.params();
    const Scheme scheme = parse_scheme(scheme_name);

    Schedule sched;
    std::string status = "optimal";
    if (scheme == Scheme::DmcOptHeuristic) {
        sched = milp_relax_schedule(inst, params);
        status = "heuristic";
    } else {
        FormulationKind kind;
        switch (scheme) {
            case Scheme::DmcOpt: kind = FormulationKind::DmcOptCp; break;
            case Scheme::DmcAll: kind = FormulationKind::McAllCp; break;
            case Scheme::UniAll: kind = FormulationKind::UniAll; break;
            default: kind = FormulationKind::DmcOpt; break;  // dmc-opt-milp
        }
        auto [problem, vm] = build_formulation(kind, inst, params);
        MilpOptions opts;
        opts.max_nodes = flags.max_nodes;
        opts.time_limit_seconds = flags.time_limit;
        const MilpSolution sol = solve_milp(problem, opts);
        if (sol.status == MilpStatus::Infeasible)
            throw InfeasibleError("no schedule meets the demands on this instance");
        if (sol.status == MilpStatus::LimitUnknown)
            throw SolverStallError("solver limit hit before any feasible schedule");
        sched = extract_schedule(vm, sol, params);
        if (sol.status == MilpStatus::LimitFeasible) status = "limit-hit";
    }

    const VerificationReport report = verify_schedule(inst, sched, params);
    if (!report.all_ok())
        throw StateError("solved schedule failed verification; encoding defect");
    if (!out.empty()) save_schedule(sched, out);
    std::printf("scheme: %s\nstatus: %s\nthroughput: %.9g\n", scheme_name.c_str(),
                status.c_str(), report.throughput);
    if (!out.empty()) std::printf("schedule: %s\n", out.c_str());
    return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& schedule_path,
               SolveFlags flags, bool slots_given) {
    const NetworkInstance inst = load_instance(instance_path);
    const Schedule sched = load_schedule(schedule_path);
    if (!slots_given) flags.slots = sched.num_slots();
    const SchedParams params = flags.params();
    const VerificationReport report = verify_schedule(inst, sched, params);

    std::printf("throughput: %.9g\n", report.throughput);
    std::printf("sinr_ok: %s\n", report.sinr_ok ? "yes" : "no");
    std::printf("worst_sinr_margin: %.9g\n", report.worst_sinr_margin);
    std::printf("power_bounds_ok: %s\n", report.power_bounds_ok ? "yes" : "no");
    for (std::size_t i = 0; i < report.budget_ok.size(); ++i)
        std::printf("budget_ok[source %zu]: %s\n", i, report.budget_ok[i] ? "yes" : "no");
    for (std::size_t i = 0; i < report.demand_ok.size(); ++i)
        for (std::size_t j = 0; j < report.demand_ok[i].size(); ++j)
            std::printf("demand_ok[source %zu][dest %zu]: %s\n", i, j,
                        report.demand_ok[i][j] ? "yes" : "no");
    std::printf("all_ok: %s\n", report.all_ok() ? "yes" : "no");
    return report.all_ok() ? 0 : kExitInfeasible;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out) {
    const std::vector<ResultRecord> records = run_experiment(cfg);
    emit_csv(records, out);
    std::printf("wrote %zu records to %s\n", records.size(), out.c_str());
    std::printf("wrote aggregate means to %s\n", aggregate_path(out).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slot schedules and transmit powers for one-hop multicast "
                 "sessions under SINR interference"};
    app.require_subcommand(1);

    // gen
    InstanceConfig gen_cfg;
    gen_cfg.num_sources = 2;
    gen_cfg.group_size = 2;
    std::string gen_out = "instance.json";
    CLI::App* gen = app.add_subcommand("gen", "generate a random instance file");
    gen->add_option("--sources", gen_cfg.num_sources, "number of multicast sources")
        ->capture_default_str();
    gen->add_option("--group-size", gen_cfg.group_size, "destinations per source")
        ->capture_default_str();
    gen->add_option("--path-loss", gen_cfg.path_loss_exponent, "path loss exponent")
        ->capture_default_str();
    gen->add_option("--noise", gen_cfg.noise_power, "noise power, mW")->capture_default_str();
    gen->add_option("--dmin", gen_cfg.distance_min, "minimum link distance")
        ->capture_default_str();
    gen->add_option("--dmax", gen_cfg.distance_max, "maximum link distance")
        ->capture_default_str();
    gen->add_option("--seed", gen_cfg.seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output instance file")->capture_default_str();

    // solve
    std::string solve_instance, solve_scheme = "dmc-opt", solve_out;
    SolveFlags solve_flags;
    CLI::App* solve = app.add_subcommand("solve", "solve one instance with one scheme");
    solve->add_option("--instance", solve_instance, "instance file")->required();
    solve->add_option("--scheme", solve_scheme,
                      "dmc-opt | dmc-all | uni-all | dmc-opt-milp | dmc-opt-heuristic")
        ->capture_default_str();
    solve->add_option("--out", solve_out, "schedule file to write");
    add_solve_flags(*solve, solve_flags);

    // verify
    std::string verify_instance, verify_schedule_path;
    SolveFlags verify_flags;
    CLI::App* verify = app.add_subcommand("verify", "audit a schedule against an instance");
    verify->add_option("--instance", verify_instance, "instance file")->required();
    verify->add_option("--schedule", verify_schedule_path, "schedule file")->required();
    add_solve_flags(*verify, verify_flags);

    // sweep
    std::string sweep_config, sweep_out = "results.csv";
    std::vector<int> sweep_sources;
    std::vector<std::string> sweep_schemes;
    int sweep_group = 0, sweep_slots = 0, sweep_demand = 0, sweep_trials = 0;
    std::uint64_t sweep_seed = 0;
    long sweep_nodes = -1;
    double sweep_tlimit = -1.0;
    bool sweep_timing = false;
    CLI::App* sweep = app.add_subcommand("sweep", "run the multi-scheme throughput sweep");
    sweep->add_option("config", sweep_config, "sweep config file (JSON)");
    sweep->add_option("--sources", sweep_sources, "source counts, e.g. 2,4,6,8,10")
        ->delimiter(',');
    sweep->add_option("--group-size", sweep_group, "destinations per source");
    sweep->add_option("--slots", sweep_slots, "slots per frame");
    sweep->add_option("--demand", sweep_demand, "per-link slot demand");
    sweep->add_option("--schemes", sweep_schemes, "schemes, e.g. dmc-opt,dmc-all,uni-all")
        ->delimiter(',');
    sweep->add_option("--trials", sweep_trials, "instances per source count");
    sweep->add_option("--seed", sweep_seed, "base seed");
    sweep->add_option("--max-nodes", sweep_nodes, "exact-solver node cap (0: unlimited)");
    sweep->add_option("--time-limit", sweep_tlimit, "exact-solver seconds cap");
    sweep->add_flag("--timing", sweep_timing, "record wall time per solve "
                    "(makes the CSV run-dependent)");
    sweep->add_option("--out", sweep_out, "records CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_cfg, gen_out);
        if (solve->parsed())
            return cmd_solve(solve_instance, solve_scheme, solve_flags, solve_out);
        if (verify->parsed())
            return cmd_verify(verify_instance, verify_schedule_path, verify_flags,
                              verify->count("--slots") > 0);
        if (sweep->parsed()) {
            ExperimentConfig cfg;
            if (!sweep_config.empty()) cfg = mcsched::load_experiment_config(sweep_config);
            if (!sweep_sources.empty()) cfg.sources = sweep_sources;
            if (sweep->count("--group-size")) cfg.group_size = sweep_group;
            if (sweep->count("--slots")) cfg.T = sweep_slots;
            if (sweep->count("--demand")) cfg.demand = sweep_demand;
            if (!sweep_schemes.empty()) {
                cfg.schemes.clear();
                for (const std::string& s : sweep_schemes)
                    cfg.schemes.push_back(mcsched::parse_scheme(s));
            }
            if (sweep->count("--trials")) cfg.trials = sweep_trials;
            if (sweep->count("--seed")) cfg.base_seed = sweep_seed;
            if (sweep->count("--max-nodes")) cfg.milp_max_nodes = sweep_nodes;
            if (sweep->count("--time-limit")) cfg.milp_time_limit = sweep_tlimit;
            if (sweep_timing) cfg.timing = true;
            return cmd_sweep(cfg, sweep_out);
        }
    } catch (const mcsched::InfeasibleError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInfeasible;
    } catch (const mcsched::RoundingFailureError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInfeasible;
    } catch (const mcsched::SolverStallError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitLimit;
    } catch (const mcsched::StateError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    } catch (const mcsched::DecodeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    } catch (const mcsched::Error& e) {
        // config, input, parse, io, lookup, kind, size, domain
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitUsage;
}
