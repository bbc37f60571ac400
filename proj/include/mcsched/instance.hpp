#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcsched/errors.hpp"

namespace mcsched {

/// Parameters for random instance generation.
///
/// Distances are drawn i.i.d. uniform from [distance_min, distance_max] for
/// every (source, destination) pair in the network, including cross-group
/// pairs, so interference terms are always defined.
struct InstanceConfig {
    int num_sources = 1;
    int group_size = 1;                 // destinations per source, uniform
    double path_loss_exponent = 3.0;
    double noise_power = 0.1;           // mW
    double distance_min = 0.05;         // strictly positive, or gains blow up
    double distance_max = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (num_sources < 1)
            throw ConfigError("num_sources must be >= 1, got " + std::to_string(num_sources));
        if (group_size < 1)
            throw ConfigError("group_size must be >= 1, got " + std::to_string(group_size));
        if (!(path_loss_exponent > 0.0))
            throw ConfigError("path_loss_exponent must be > 0, got " +
                              std::to_string(path_loss_exponent));
        if (!(noise_power > 0.0))
            throw ConfigError("noise_power must be > 0, got " + std::to_string(noise_power));
        if (!(distance_min > 0.0))
            throw ConfigError("distance_min must be > 0 (zero distance makes the gain "
                              "singular), got " + std::to_string(distance_min));
        if (!(distance_max >= distance_min))
            throw ConfigError("distance_max must be >= distance_min");
    }
};

/// A one-hop multicast network: sources, their destination groups, and the
/// full source-to-destination distance matrix.
///
/// Destination ids are global: 0..num_destinations()-1, with each group
/// owning a contiguous block. distances[i][j] is defined for every source i
/// and every destination j in the network, not just j in group i.
struct NetworkInstance {
    int num_sources = 0;
    std::vector<std::vector<int>> groups;        // per source: global destination ids
    std::vector<std::vector<double>> distances;  // [source][destination], all destinations
    double path_loss_exponent = 3.0;
    double noise_power = 0.1;                    // mW (sigma^2)

    int num_destinations() const {
        int n = 0;
        for (const auto& g : groups) n += static_cast<int>(g.size());
        return n;
    }

    int group_size(int source) const {
        check_source(source);
        return static_cast<int>(groups[source].size());
    }

    /// Source whose group contains the given global destination id.
    int dest_owner(int dest) const {
        check_dest(dest);
        for (int i = 0; i < num_sources; ++i)
            for (int j : groups[i])
                if (j == dest) return i;
        throw LookupError("destination " + std::to_string(dest) + " belongs to no group");
    }

    /// Channel gain 1/d^a between source i and destination j.
    double gain(int source, int dest) const {
        check_source(source);
        check_dest(dest);
        return std::pow(distances[source][dest], -path_loss_exponent);
    }

    void validate() const {
        if (num_sources < 1) throw ConfigError("instance must have at least one source");
        if (static_cast<int>(groups.size()) != num_sources)
            throw ConfigError("groups size does not match num_sources");
        if (static_cast<int>(distances.size()) != num_sources)
            throw ConfigError("distance matrix must have one row per source");
        const int m = num_destinations();
        std::vector<int> owner(m, -1);
        for (int i = 0; i < num_sources; ++i) {
            if (groups[i].empty())
                throw ConfigError("group of source " + std::to_string(i) + " is empty");
            for (int j : groups[i]) {
                if (j < 0 || j >= m)
                    throw ConfigError("destination id " + std::to_string(j) + " out of range");
                if (owner[j] != -1)
                    throw ConfigError("destination " + std::to_string(j) +
                                      " belongs to more than one group");
                owner[j] = i;
            }
        }
        for (int i = 0; i < num_sources; ++i) {
            if (static_cast<int>(distances[i].size()) != m)
                throw ConfigError("distance row " + std::to_string(i) +
                                  " must cover every destination");
            for (int j = 0; j < m; ++j)
                if (!(distances[i][j] > 0.0) || !std::isfinite(distances[i][j]))
                    throw ConfigError("distance (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") must be strictly positive");
        }
        if (!(path_loss_exponent > 0.0))
            throw ConfigError("path_loss_exponent must be > 0");
        if (!(noise_power > 0.0)) throw ConfigError("noise_power must be > 0");
    }

private:
    void check_source(int i) const {
        if (i < 0 || i >= num_sources)
            throw LookupError("unknown source id " + std::to_string(i));
    }
    void check_dest(int j) const {
        int m = 0;
        for (const auto& g : groups) m += static_cast<int>(g.size());
        if (j < 0 || j >= m)
            throw LookupError("unknown destination id " + std::to_string(j));
    }
};

/// Draws a double uniformly from [lo, hi] using raw engine output, so the
/// bit pattern only depends on the engine state, not on the standard
/// library's distribution implementation.
inline double uniform_draw(std::mt19937_64& eng, double lo, double hi) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;  // [0,1)
    return lo + u * (hi - lo);
}

/// Generates a random instance. Deterministic for a fixed seed: repeated
/// calls produce bit-identical distance matrices.
inline NetworkInstance generate_instance(const InstanceConfig& config) {
    config.validate();
    NetworkInstance inst;
    inst.num_sources = config.num_sources;
    inst.path_loss_exponent = config.path_loss_exponent;
    inst.noise_power = config.noise_power;

    const int total_dests = config.num_sources * config.group_size;
    inst.groups.resize(config.num_sources);
    int next_id = 0;
    for (int i = 0; i < config.num_sources; ++i)
        for (int d = 0; d < config.group_size; ++d)
            inst.groups[i].push_back(next_id++);

    std::mt19937_64 eng(config.seed);
    inst.distances.assign(config.num_sources, std::vector<double>(total_dests, 0.0));
    for (int i = 0; i < config.num_sources; ++i)
        for (int j = 0; j < total_dests; ++j)
            inst.distances[i][j] = uniform_draw(eng, config.distance_min, config.distance_max);

    return inst;
}

/// SINR at destination j when the sources transmit with the given per-source
/// powers (mW) in one slot: P_i * g_ij / (sigma^2 + sum_{k != i} P_k * g_kj).
inline double sinr(const NetworkInstance& inst, std::span<const double> powers,
                   int source, int dest) {
    if (static_cast<int>(powers.size()) != inst.num_sources)
        throw InputError("powers must have one entry per source");
    for (double p : powers)
        if (p < 0.0) throw DomainError("transmit power must be non-negative");
    const double numerator = powers[source] * inst.gain(source, dest);
    double denominator = inst.noise_power;
    for (int k = 0; k < inst.num_sources; ++k) {
        if (k == source) continue;
        denominator += powers[k] * inst.gain(k, dest);
    }
    return numerator / denominator;
}

/// Pairwise interference structure over the point-to-point links of the
/// instance. Diagnostic only; the optimization works on the SINR constraints
/// directly.
struct ConflictGraph {
    std::vector<std::pair<int, int>> links;   // (source, global destination id)
    std::vector<std::vector<char>> adjacency; // symmetric, zero diagonal

    std::size_t num_links() const { return links.size(); }

    std::size_t num_edges() const {
        std::size_t e = 0;
        for (std::size_t a = 0; a < links.size(); ++a)
            for (std::size_t b = a + 1; b < links.size(); ++b)
                if (adjacency[a][b]) ++e;
        return e;
    }

    bool conflict(std::size_t a, std::size_t b) const { return adjacency[a][b] != 0; }
};

/// Builds the conflict graph with a two-transmitter check: links (i,j) and
/// (k,l) with i != k conflict when activating both transmitters at
/// reference_power drives the SINR below beta at j or at l. Links sharing a
/// transmitter are never adjacent.
inline ConflictGraph build_conflict_graph(const NetworkInstance& inst,
                                          double reference_power, double beta) {
    if (!(reference_power > 0.0))
        throw ConfigError("reference_power must be > 0");
    ConflictGraph g;
    for (int i = 0; i < inst.num_sources; ++i)
        for (int j : inst.groups[i]) g.links.emplace_back(i, j);

    const std::size_t n = g.links.size();
    g.adjacency.assign(n, std::vector<char>(n, 0));
    std::vector<double> powers(inst.num_sources, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto [ia, ja] = g.links[a];
            const auto [ib, jb] = g.links[b];
            if (ia == ib) continue;
            std::fill(powers.begin(), powers.end(), 0.0);
            powers[ia] = reference_power;
            powers[ib] = reference_power;
            const bool clash = sinr(inst, powers, ia, ja) < beta ||
                               sinr(inst, powers, ib, jb) < beta;
            if (clash) {
                g.adjacency[a][b] = 1;
                g.adjacency[b][a] = 1;
            }
        }
    }
    return g;
}

}  // namespace mcsched
