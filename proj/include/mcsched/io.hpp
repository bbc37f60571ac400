#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mcsched/errors.hpp"
#include "mcsched/experiment.hpp"
#include "mcsched/formulations.hpp"
#include "mcsched/instance.hpp"

namespace mcsched {
namespace detail {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed on " + path);
    return std::move(buf).str();
}

inline void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("write failed on " + path);
}

/// Parses JSON text; syntax errors surface as ParseError with the line and
/// column nlohmann already pinpoints.
inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

template <typename T>
T json_field(const nlohmann::json& j, const char* key, const std::string& what) {
    if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
    if (!j.contains(key)) throw ParseError(what + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(what + ": field '" + key + "': " + e.what());
    }
}

template <typename T>
T json_field_or(const nlohmann::json& j, const char* key, T fallback,
                const std::string& what) {
    if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(what + ": field '" + key + "': " + e.what());
    }
}

/// Shortest decimal form that strtod parses back bit-identically, so CSV
/// round-trips are exact without drowning the file in digits.
inline std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// network instances

inline void save_instance(const NetworkInstance& inst, const std::string& path) {
    inst.validate();
    nlohmann::json j;
    j["num_sources"] = inst.num_sources;
    j["groups"] = inst.groups;
    j["distances"] = inst.distances;
    j["path_loss_exponent"] = inst.path_loss_exponent;
    j["noise_power"] = inst.noise_power;
    detail::spill(path, j.dump(2) + "\n");
}

inline NetworkInstance load_instance(const std::string& path) {
    const std::string what = "instance file " + path;
    const nlohmann::json j = detail::parse_json(detail::slurp(path), what);
    NetworkInstance inst;
    inst.num_sources = detail::json_field<int>(j, "num_sources", what);
    inst.groups = detail::json_field<std::vector<std::vector<int>>>(j, "groups", what);
    inst.distances =
        detail::json_field<std::vector<std::vector<double>>>(j, "distances", what);
    inst.path_loss_exponent = detail::json_field<double>(j, "path_loss_exponent", what);
    inst.noise_power = detail::json_field<double>(j, "noise_power", what);
    inst.validate();
    return inst;
}

// ---------------------------------------------------------------------------
// schedules

inline void save_schedule(const Schedule& sched, const std::string& path) {
    nlohmann::json j;
    j["kind"] = to_string(sched.kind);
    auto& acts = j["activations"] = nlohmann::json::array();
    for (const auto& slot : sched.activations) {
        nlohmann::json js = nlohmann::json::array();
        for (const auto& group : slot) {
            std::vector<int> bits(group.begin(), group.end());
            js.push_back(bits);
        }
        acts.push_back(std::move(js));
    }
    j["powers"] = sched.powers;
    detail::spill(path, j.dump(2) + "\n");
}

inline Schedule load_schedule(const std::string& path) {
    const std::string what = "schedule file " + path;
    const nlohmann::json j = detail::parse_json(detail::slurp(path), what);
    Schedule sched;
    sched.kind = parse_formulation_kind(detail::json_field<std::string>(j, "kind", what));
    const auto acts =
        detail::json_field<std::vector<std::vector<std::vector<int>>>>(j, "activations", what);
    sched.powers = detail::json_field<std::vector<std::vector<double>>>(j, "powers", what);
    sched.activations.resize(acts.size());
    for (std::size_t t = 0; t < acts.size(); ++t) {
        sched.activations[t].resize(acts[t].size());
        for (std::size_t i = 0; i < acts[t].size(); ++i) {
            sched.activations[t][i].reserve(acts[t][i].size());
            for (int v : acts[t][i]) {
                if (v != 0 && v != 1)
                    throw ParseError(what + ": activations must be 0 or 1, got " +
                                     std::to_string(v));
                sched.activations[t][i].push_back(static_cast<char>(v));
            }
        }
    }
    if (sched.powers.size() != sched.activations.size())
        throw ParseError(what + ": powers and activations disagree on the slot count");
    for (std::size_t t = 0; t < acts.size(); ++t)
        if (sched.powers[t].size() != sched.activations[t].size())
            throw ParseError(what + ": slot " + std::to_string(t) +
                             " powers and activations disagree on the source count");
    return sched;
}

// ---------------------------------------------------------------------------
// experiment configs

inline ExperimentConfig load_experiment_config(const std::string& path) {
    const std::string what = "config file " + path;
    const nlohmann::json j = detail::parse_json(detail::slurp(path), what);
    ExperimentConfig cfg;
    cfg.sources = detail::json_field_or(j, "sources", cfg.sources, what);
    cfg.group_size = detail::json_field_or(j, "group_size", cfg.group_size, what);
    cfg.T = detail::json_field_or(j, "slots", cfg.T, what);
    cfg.demand = detail::json_field_or(j, "demand", cfg.demand, what);
    if (j.contains("schemes")) {
        cfg.schemes.clear();
        for (const std::string& name :
             detail::json_field<std::vector<std::string>>(j, "schemes", what)) {
            try {
                cfg.schemes.push_back(parse_scheme(name));
            } catch (const UnsupportedKindError& e) {
                throw ParseError(what + ": field 'schemes': " + e.what());
            }
        }
    }
    cfg.trials = detail::json_field_or(j, "trials", cfg.trials, what);
    cfg.base_seed = detail::json_field_or(j, "seed", cfg.base_seed, what);
    cfg.path_loss_exponent =
        detail::json_field_or(j, "path_loss_exponent", cfg.path_loss_exponent, what);
    cfg.noise_power = detail::json_field_or(j, "noise_power", cfg.noise_power, what);
    cfg.distance_min = detail::json_field_or(j, "distance_min", cfg.distance_min, what);
    cfg.distance_max = detail::json_field_or(j, "distance_max", cfg.distance_max, what);
    cfg.beta = detail::json_field_or(j, "beta", cfg.beta, what);
    cfg.p_slot_max = detail::json_field_or(j, "p_slot_max", cfg.p_slot_max, what);
    cfg.p_slot_min = detail::json_field_or(j, "p_slot_min", cfg.p_slot_min, what);
    cfg.const_power = detail::json_field_or(j, "const_power", cfg.const_power, what);
    if (j.contains("p_budget"))
        cfg.p_budget = detail::json_field<double>(j, "p_budget", what);
    cfg.milp_max_nodes =
        detail::json_field_or<long>(j, "milp_max_nodes", cfg.milp_max_nodes, what);
    cfg.milp_time_limit =
        detail::json_field_or(j, "milp_time_limit", cfg.milp_time_limit, what);
    cfg.timing = detail::json_field_or(j, "timing", cfg.timing, what);
    cfg.validate();
    return cfg;
}

inline void save_experiment_config(const ExperimentConfig& cfg, const std::string& path) {
    cfg.validate();
    nlohmann::json j;
    j["sources"] = cfg.sources;
    j["group_size"] = cfg.group_size;
    j["slots"] = cfg.T;
    j["demand"] = cfg.demand;
    std::vector<std::string> names;
    for (Scheme s : cfg.schemes) names.emplace_back(to_string(s));
    j["schemes"] = names;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.base_seed;
    j["path_loss_exponent"] = cfg.path_loss_exponent;
    j["noise_power"] = cfg.noise_power;
    j["distance_min"] = cfg.distance_min;
    j["distance_max"] = cfg.distance_max;
    j["beta"] = cfg.beta;
    j["p_slot_max"] = cfg.p_slot_max;
    j["p_slot_min"] = cfg.p_slot_min;
    j["const_power"] = cfg.const_power;
    if (cfg.p_budget) j["p_budget"] = *cfg.p_budget;
    j["milp_max_nodes"] = cfg.milp_max_nodes;
    j["milp_time_limit"] = cfg.milp_time_limit;
    j["timing"] = cfg.timing;
    detail::spill(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// result CSVs

inline constexpr const char* kCsvHeader = "scheme,N,D,T,B,seed,throughput,status,seconds";

/// Companion path for the mean-aggregate file: stem_mean.ext.
inline std::string aggregate_path(const std::string& records_path) {
    const std::size_t slash = records_path.find_last_of('/');
    const std::size_t dot = records_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return records_path + "_mean";
    return records_path.substr(0, dot) + "_mean" + records_path.substr(dot);
}

inline std::string format_records_csv(std::vector<ResultRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const ResultRecord& a, const ResultRecord& b) {
                  const std::string sa = to_string(a.scheme), sb = to_string(b.scheme);
                  if (sa != sb) return sa < sb;
                  if (a.N != b.N) return a.N < b.N;
                  return a.seed < b.seed;
              });
    std::string out = kCsvHeader;
    out += '\n';
    for (const ResultRecord& r : records) {
        out += to_string(r.scheme);
        out += ',' + std::to_string(r.N) + ',' + std::to_string(r.D);
        out += ',' + std::to_string(r.T) + ',' + std::to_string(r.B);
        out += ',' + std::to_string(r.seed);
        out += ',' + detail::fmt_double(r.throughput);
        out += ',';
        out += to_string(r.status);
        out += ',' + detail::fmt_double(r.seconds) + '\n';
    }
    return out;
}

inline std::string format_aggregate_csv(const std::vector<ResultRecord>& records) {
    std::map<std::pair<std::string, int>, std::pair<double, int>> groups;
    for (const ResultRecord& r : records) {
        auto& [sum, count] = groups[{to_string(r.scheme), r.N}];
        sum += r.throughput;
        ++count;
    }
    std::string out = "scheme,N,mean_throughput,records\n";
    for (const auto& [key, agg] : groups) {
        out += key.first + ',' + std::to_string(key.second);
        out += ',' + detail::fmt_double(agg.first / agg.second);
        out += ',' + std::to_string(agg.second) + '\n';
    }
    return out;
}

/// Writes the record CSV plus its mean-aggregate companion. Rows are sorted
/// by (scheme, N, seed) so identical record sets emit identical bytes no
/// matter how the sweep ordered its work.
inline void emit_csv(const std::vector<ResultRecord>& records, const std::string& path) {
    if (records.empty()) throw InputError("no records to emit");
    detail::spill(path, format_records_csv(records));
    detail::spill(aggregate_path(path), format_aggregate_csv(records));
}

/// Parses a record CSV produced by emit_csv back into records.
inline std::vector<ResultRecord> parse_results_csv(const std::string& path) {
    const std::string what = "results file " + path;
    std::istringstream in(detail::slurp(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(what + ": empty file");
    if (line != kCsvHeader)
        throw ParseError(what + ": unexpected header '" + line + "'");
    std::vector<ResultRecord> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9)
            throw ParseError(what + ": line " + std::to_string(lineno) + ": expected 9 "
                             "fields, got " + std::to_string(cells.size()));
        try {
            ResultRecord r;
            r.scheme = parse_scheme(cells[0]);
            r.N = std::stoi(cells[1]);
            r.D = std::stoi(cells[2]);
            r.T = std::stoi(cells[3]);
            r.B = std::stoi(cells[4]);
            r.seed = std::stoull(cells[5]);
            r.throughput = std::stod(cells[6]);
            r.status = parse_record_status(cells[7]);
            r.seconds = std::stod(cells[8]);
            records.push_back(r);
        } catch (const UnsupportedKindError& e) {
            throw ParseError(what + ": line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::logic_error&) {
            throw ParseError(what + ": line " + std::to_string(lineno) +
                             ": malformed numeric field");
        }
    }
    return records;
}

}  // namespace mcsched
